import type { FeedbackRuleInfo } from "./types.js";

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function filterRulesByLabel(
  rules: FeedbackRuleInfo[],
  label: string | null,
): FeedbackRuleInfo[] {
  if (label === null) {
    return rules;
  }
  return rules.filter((rule) => rule.corrected.label === label);
}

export function renderRuleRow(rule: FeedbackRuleInfo): string {
  const original = rule.original
    ? `<code>${escapeHtml(rule.original.clause)}</code> &rarr; ${escapeHtml(rule.original.label)}`
    : `<span class="badge">no original rule</span>`;
  const transformation = rule.transformation?.description
    ? `<code class="transformation">${escapeHtml(rule.transformation.description)}</code>`
    : `<span class="muted">&mdash;</span>`;
  return `<tr data-rule-id="${escapeHtml(rule.id)}">
    <td>${escapeHtml(rule.id)}</td>
    <td>${original}</td>
    <td><code>${escapeHtml(rule.corrected.clause)}</code> &rarr; ${escapeHtml(rule.corrected.label)}</td>
    <td>${transformation}</td>
    <td><button class="delete-rule" data-rule-id="${escapeHtml(rule.id)}">delete</button></td>
  </tr>`;
}

export function renderRuleTable(rules: FeedbackRuleInfo[], labelFilter: string | null): string {
  const visible = filterRulesByLabel(rules, labelFilter);
  if (visible.length === 0) {
    return `<p class="empty-state">No feedback rules stored yet.</p>`;
  }
  const rows = visible.map(renderRuleRow).join("\n");
  return `<table class="rules">
    <thead><tr><th>id</th><th>original</th><th>corrected</th><th>transformation</th><th></th></tr></thead>
    <tbody>${rows}</tbody>
  </table>`;
}

export function renderConflict(conflictWith: string, rules: FeedbackRuleInfo[]): string {
  const culprit = rules.find((rule) => rule.id === conflictWith);
  const detail = culprit
    ? `<code>${escapeHtml(culprit.corrected.clause)}</code> &rarr; ${escapeHtml(culprit.corrected.label)}`
    : escapeHtml(conflictWith);
  return `<div class="conflict">Rejected: conflicts with stored rule ${escapeHtml(conflictWith)} (${detail})</div>`;
}
