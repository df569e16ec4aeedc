import { ApiClient, ApiError, ConflictError } from "./api.js";
import { ClauseEditorState } from "./editor.js";
import { featureByName, operatorsFor } from "./clause.js";
import { renderConflict, renderRuleTable } from "./rules-view.js";
import type {
  FeedbackRuleInfo,
  Instance,
  PredictionResponse,
  SchemaInfo,
} from "./types.js";

const PAGE_SIZE = 12;

interface AppState {
  schema: SchemaInfo;
  split: string;
  offset: number;
  total: number;
  instances: { instance: Instance; label: string }[];
  selected: Instance | null;
  response: PredictionResponse | null;
  preview: PredictionResponse | null;
  editor: ClauseEditorState | null;
  rules: FeedbackRuleInfo[];
  labelFilter: string | null;
  notice: string;
}

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

export function renderPrediction(response: PredictionResponse): string {
  const rows = [
    ["model prediction", response.prediction],
    ["soft commit", response.sc_prediction],
    ["hard commit", response.hc_prediction],
    ["user label", response.user_label ?? "—"],
    ["explanation", response.explanation ?? "—"],
    ["transformation", response.transformation_description || "—"],
    ["feedback rule", response.feedback_rule_id ?? "—"],
  ];
  return rows
    .map(([name, value]) => `<dt>${name}</dt><dd>${value}</dd>`)
    .join("");
}

export class App {
  private state: AppState;

  constructor(
    private readonly client: ApiClient,
    schema: SchemaInfo,
  ) {
    this.state = {
      schema,
      split: "test",
      offset: 0,
      total: 0,
      instances: [],
      selected: null,
      response: null,
      preview: null,
      editor: null,
      rules: [],
      labelFilter: null,
      notice: "",
    };
  }

  static async boot(baseUrl: string): Promise<App> {
    const client = new ApiClient(baseUrl);
    const app = new App(client, await client.getSchema());
    await app.loadInstances(0);
    await app.refreshRules();
    app.render();
    return app;
  }

  async loadInstances(offset: number): Promise<void> {
    const page = await this.client.listInstances(this.state.split, offset, PAGE_SIZE);
    this.state.offset = page.offset;
    this.state.total = page.total;
    this.state.instances = page.rows;
    this.render();
  }

  async select(instance: Instance): Promise<void> {
    this.state.selected = instance;
    this.state.preview = null;
    this.state.notice = "";
    this.state.response = await this.client.predict(instance);
    const { explanation, prediction } = this.state.response;
    this.state.editor = new ClauseEditorState(
      this.state.schema,
      explanation !== null ? { clause: explanation, label: prediction } : null,
      prediction,
    );
    this.render();
  }

  async previewEdit(): Promise<void> {
    const { editor, selected } = this.state;
    if (!editor || !selected || !editor.canSubmit) {
      return;
    }
    this.state.preview = await this.client.whatIf(
      selected,
      editor.correctedRule(),
      editor.original ?? undefined,
    );
    this.render();
  }

  async commitEdit(): Promise<void> {
    const { editor } = this.state;
    if (!editor || !editor.canSubmit) {
      return;
    }
    try {
      const id = await this.client.commitFeedback(
        editor.correctedRule(),
        editor.original ?? undefined,
      );
      this.state.notice = `<div class="ok">Stored feedback rule ${id}.</div>`;
      this.state.preview = null;
      await this.refreshRules();
      if (this.state.selected) {
        await this.select(this.state.selected);
      }
    } catch (error) {
      if (error instanceof ConflictError) {
        this.state.notice = renderConflict(error.conflictWith, this.state.rules);
      } else if (error instanceof ApiError) {
        this.state.notice = `<div class="conflict">${error.kind}: ${error.message}</div>`;
      } else {
        throw error;
      }
      this.render();
    }
  }

  async deleteRule(id: string): Promise<void> {
    await this.client.deleteRule(id);
    await this.refreshRules();
    if (this.state.selected) {
      await this.select(this.state.selected);
    }
  }

  async refreshRules(): Promise<void> {
    this.state.rules = await this.client.listRules();
    this.render();
  }

  setLabelFilter(label: string | null): void {
    this.state.labelFilter = label;
    this.render();
  }

  private renderEditor(): string {
    const { editor, schema } = this.state;
    if (!editor) {
      return `<p class="empty-state">Select an instance to edit its explanation.</p>`;
    }
    const rows = editor.rows
      .map((row, i) => {
        const kind = featureByName(schema, row.feature)?.kind ?? "numeric";
        const features = schema.features
          .map(
            (f) =>
              `<option value="${f.name}"${f.name === row.feature ? " selected" : ""}>${f.name}</option>`,
          )
          .join("");
        const operators = operatorsFor(kind)
          .map(
            (op) =>
              `<option value="${op}"${op === row.operator ? " selected" : ""}>${op}</option>`,
          )
          .join("");
        const value =
          kind === "categorical"
            ? `<select data-row="${i}" class="row-value">${(
                featureByName(schema, row.feature)?.domain ?? []
              )
                .map(
                  (v) =>
                    `<option value="${v}"${v === row.value ? " selected" : ""}>${v}</option>`,
                )
                .join("")}</select>`
            : `<input data-row="${i}" class="row-value" value="${row.value}">`;
        return `<div class="condition" data-row="${i}">
          <select data-row="${i}" class="row-feature">${features}</select>
          <select data-row="${i}" class="row-operator">${operators}</select>
          ${value}
          <button data-row="${i}" class="row-delete">✕</button>
        </div>`;
      })
      .join("\n");
    const messages = editor
      .validationMessages()
      .map((m) => `<li>${m}</li>`)
      .join("");
    return `${rows}
      <button id="add-condition">add condition</button>
      <label>label
        <button id="toggle-label">${editor.label}</button>
      </label>
      <ul class="validation">${messages}</ul>
      <button id="preview" ${editor.canSubmit ? "" : "disabled"}>preview</button>
      <button id="commit" ${editor.canSubmit ? "" : "disabled"}>commit</button>`;
  }

  render(): void {
    if (typeof document === "undefined") {
      return;
    }
    el("instances").innerHTML = this.state.instances
      .map(
        (row, i) =>
          `<li><button class="pick" data-index="${i}">${JSON.stringify(row.instance)} (${row.label})</button></li>`,
      )
      .join("");
    el("paging").textContent =
      `${this.state.offset + 1}–${this.state.offset + this.state.instances.length} of ${this.state.total}`;
    el("prediction").innerHTML = this.state.response
      ? `<dl>${renderPrediction(this.state.response)}</dl>`
      : "";
    el("preview-panel").innerHTML = this.state.preview
      ? `<h3>what-if preview</h3><dl>${renderPrediction(this.state.preview)}</dl>`
      : "";
    el("editor").innerHTML = this.renderEditor();
    el("notice").innerHTML = this.state.notice;
    el("rules").innerHTML = renderRuleTable(this.state.rules, this.state.labelFilter);
    this.bind();
  }

  private bind(): void {
    document.querySelectorAll<HTMLButtonElement>(".pick").forEach((button) => {
      button.onclick = () => {
        const index = Number(button.dataset.index);
        void this.select(this.state.instances[index].instance);
      };
    });
    document.querySelectorAll<HTMLButtonElement>(".delete-rule").forEach((button) => {
      button.onclick = () => void this.deleteRule(button.dataset.ruleId ?? "");
    });
    const editor = this.state.editor;
    if (!editor) {
      return;
    }
    document.querySelectorAll<HTMLSelectElement>(".row-feature").forEach((select) => {
      select.onchange = () => {
        const i = Number(select.dataset.row);
        const kind = featureByName(this.state.schema, select.value)?.kind ?? "numeric";
        editor.updateRow(i, {
          feature: select.value,
          operator: kind === "numeric" ? "<=" : "==",
          value: "",
        });
        this.render();
      };
    });
    document.querySelectorAll<HTMLSelectElement>(".row-operator").forEach((select) => {
      select.onchange = () => {
        editor.updateRow(Number(select.dataset.row), { operator: select.value });
        this.render();
      };
    });
    document.querySelectorAll<HTMLInputElement | HTMLSelectElement>(".row-value").forEach((input) => {
      input.onchange = () => {
        editor.updateRow(Number(input.dataset.row), { value: input.value });
        this.render();
      };
    });
    document.querySelectorAll<HTMLButtonElement>(".row-delete").forEach((button) => {
      button.onclick = () => {
        editor.deleteRow(Number(button.dataset.row));
        this.render();
      };
    });
    const add = document.getElementById("add-condition");
    if (add) {
      add.onclick = () => {
        editor.addRow();
        this.render();
      };
    }
    const toggle = document.getElementById("toggle-label");
    if (toggle) {
      toggle.onclick = () => {
        editor.toggleLabel();
        this.render();
      };
    }
    const preview = document.getElementById("preview");
    if (preview) {
      preview.onclick = () => void this.previewEdit();
    }
    const commit = document.getElementById("commit");
    if (commit) {
      commit.onclick = () => void this.commitEdit();
    }
  }
}

declare global {
  interface Window {
    rulepatchApp?: Promise<App>;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && document.getElementById("instances")) {
  window.rulepatchApp = App.boot(window.location.origin);
}
