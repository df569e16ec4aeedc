import {
  ConditionRow,
  RowValidation,
  featureByName,
  formatClause,
  parseClause,
  validateRow,
} from "./clause.js";
import type { RuleText, SchemaInfo } from "./types.js";

/** Editable copy of one explanation rule; submit requires a valid modification. */
export class ClauseEditorState {
  rows: ConditionRow[];
  label: string;
  readonly original: RuleText | null;

  constructor(
    private readonly schema: SchemaInfo,
    original: RuleText | null,
    initialLabel?: string,
  ) {
    this.original = original;
    this.rows = original ? parseClause(original.clause, schema) : [];
    this.label = original?.label ?? initialLabel ?? schema.labels[0];
  }

  addRow(feature?: string): void {
    const name = feature ?? this.schema.features[0].name;
    const kind = featureByName(this.schema, name)?.kind ?? "numeric";
    this.rows.push({ feature: name, operator: kind === "numeric" ? "<=" : "==", value: "" });
  }

  deleteRow(index: number): void {
    this.rows.splice(index, 1);
  }

  updateRow(index: number, patch: Partial<ConditionRow>): void {
    this.rows[index] = { ...this.rows[index], ...patch };
  }

  toggleLabel(): void {
    const [negative, positive] = this.schema.labels;
    this.label = this.label === negative ? positive : negative;
  }

  validations(): RowValidation[] {
    return this.rows.map((row) => validateRow(row, this.schema));
  }

  validationMessages(): string[] {
    const messages = this.validations()
      .map((v, i) => (v.valid ? null : `condition ${i + 1}: ${v.message}`))
      .filter((m): m is string => m !== null);
    const seen = new Set<string>();
    this.rows.forEach((row, i) => {
      if (seen.has(row.feature)) {
        messages.push(`condition ${i + 1}: duplicate feature ${row.feature}`);
      }
      seen.add(row.feature);
    });
    return messages;
  }

  private normalized(clause: string, label: string): string {
    const conditions = clause === "" ? [] : clause.split(" AND ");
    return `${[...conditions].sort().join(" AND ")}@${label}`;
  }

  /** True once the rule differs from the original (condition order aside). */
  get dirty(): boolean {
    if (!this.original) {
      return true;
    }
    if (this.validationMessages().length > 0) {
      return true;
    }
    return (
      this.normalized(this.correctedRule().clause, this.label) !==
      this.normalized(this.original.clause, this.original.label)
    );
  }

  get canSubmit(): boolean {
    return this.validationMessages().length === 0 && this.dirty;
  }

  correctedRule(): RuleText {
    return { clause: formatClause(this.rows, this.schema), label: this.label };
  }
}
