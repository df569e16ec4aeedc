import type { FeatureInfo, FeatureKind, SchemaInfo } from "./types.js";

export const NUMERIC_OPERATORS = ["==", "!=", ">", ">=", "<", "<="] as const;
export const CATEGORICAL_OPERATORS = ["==", "!="] as const;

export type Operator = (typeof NUMERIC_OPERATORS)[number];

export interface ConditionRow {
  feature: string;
  operator: string;
  value: string;
}

export function operatorsFor(kind: FeatureKind): readonly string[] {
  return kind === "numeric" ? NUMERIC_OPERATORS : CATEGORICAL_OPERATORS;
}

export function featureByName(schema: SchemaInfo, name: string): FeatureInfo | undefined {
  return schema.features.find((f) => f.name === name);
}

/** Numbers print like the service stores them: integral values keep one decimal. */
export function formatNumericValue(value: number): string {
  return Number.isInteger(value) ? `${value}.0` : String(value);
}

export function formatCondition(row: ConditionRow, schema: SchemaInfo): string {
  const feature = featureByName(schema, row.feature);
  if (!feature) {
    throw new Error(`unknown feature ${row.feature}`);
  }
  const value =
    feature.kind === "numeric"
      ? formatNumericValue(Number(row.value))
      : `"${row.value}"`;
  return `${row.feature} ${row.operator} ${value}`;
}

export function formatClause(rows: ConditionRow[], schema: SchemaInfo): string {
  return rows.map((row) => formatCondition(row, schema)).join(" AND ");
}

const CONDITION_PATTERN = /^\s*([^\s<>=!]+)\s*(==|!=|>=|<=|>|<)\s*(.+?)\s*$/;

/** Parse clause text from the service into editor rows; empty text → no rows. */
export function parseClause(text: string, schema: SchemaInfo): ConditionRow[] {
  if (text.trim() === "") {
    return [];
  }
  return text.split(" AND ").map((part) => {
    const match = CONDITION_PATTERN.exec(part);
    if (!match) {
      throw new Error(`cannot parse condition ${JSON.stringify(part)}`);
    }
    const [, featureName, operator, rawValue] = match;
    const feature = featureByName(schema, featureName);
    if (!feature) {
      throw new Error(`unknown feature ${featureName}`);
    }
    let value: string;
    if (rawValue.startsWith('"') && rawValue.endsWith('"')) {
      value = rawValue.slice(1, -1);
    } else if (feature.kind === "numeric") {
      value = rawValue;
    } else {
      throw new Error(`categorical value must be quoted: ${rawValue}`);
    }
    return { feature: featureName, operator, value };
  });
}

export interface RowValidation {
  valid: boolean;
  message?: string;
}

export function validateRow(row: ConditionRow, schema: SchemaInfo): RowValidation {
  const feature = featureByName(schema, row.feature);
  if (!feature) {
    return { valid: false, message: "pick a feature" };
  }
  if (!operatorsFor(feature.kind).includes(row.operator)) {
    return { valid: false, message: `operator ${row.operator} not allowed for ${feature.kind}` };
  }
  if (feature.kind === "numeric") {
    if (row.value.trim() === "" || Number.isNaN(Number(row.value))) {
      return { valid: false, message: "enter a number" };
    }
    return { valid: true };
  }
  if (!feature.domain?.includes(row.value)) {
    return { valid: false, message: "pick a category" };
  }
  return { valid: true };
}
