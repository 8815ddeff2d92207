// HTML string builders. Pure string-in, string-out so they can be tested
// without a DOM. Scores and confidences are printed exactly as the service
// sent them (String() on the parsed JSON number round-trips the value).

import type { DecisionPayload, TracePayload } from "./api.js";
import type { ProbeResult, TranscriptEntry } from "./state.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

function formatNumber(value: number | null): string {
  return value === null ? "n/a" : String(value);
}

function outcomeChip(outcome: string): string {
  const cls = outcome === "in_scope" ? "chip chip-in" : "chip chip-out";
  return `<span class="${cls}">${escapeHtml(outcome)}</span>`;
}

export function renderTranscript(
  transcript: readonly TranscriptEntry[],
): string {
  if (transcript.length === 0) {
    return '<p class="empty">No messages yet. Ask the bot something.</p>';
  }
  const parts: string[] = [];
  transcript.forEach((entry, index) => {
    const oos = entry.outcome === "out_of_scope";
    const badge = oos ? '<span class="badge">out of scope</span>' : "";
    parts.push(
      `<div class="exchange" data-index="${index}" data-decision="${entry.decisionId}">`,
      `<div class="bubble user">${escapeHtml(entry.user)}</div>`,
      `<div class="bubble bot${oos ? " oos" : ""}">${escapeHtml(entry.response)}${badge}</div>`,
      "</div>",
    );
  });
  return parts.join("");
}

function renderShortlist(trace: TracePayload): string {
  if (trace.shortlist.length === 0) {
    return '<p class="empty">shortlist is empty</p>';
  }
  const rows = trace.shortlist
    .map(
      (row) =>
        `<tr><td>${escapeHtml(row.intent_id)}</td>` +
        `<td class="num">${formatNumber(row.score)}</td></tr>`,
    )
    .join("");
  return (
    '<table class="shortlist"><thead><tr><th>intent</th><th>score</th></tr></thead>' +
    `<tbody>${rows}</tbody></table>`
  );
}

function renderPrompt(trace: TracePayload): string {
  if (trace.prompt === null) {
    return "";
  }
  const options = trace.prompt.options
    .map(
      (opt) =>
        `<li>${opt.position}. (${escapeHtml(opt.letter)}) ${escapeHtml(opt.label)}</li>`,
    )
    .join("");
  const messages = trace.prompt.rendered
    .map(
      (msg) =>
        `<div class="msg"><span class="role">${escapeHtml(msg.role)}</span>` +
        `<pre>${escapeHtml(msg.content)}</pre></div>`,
    )
    .join("");
  return (
    `<h3>Prompt (${escapeHtml(trace.prompt.template_id)})</h3>` +
    `<ol class="options">${options}</ol>${messages}`
  );
}

function renderVerdict(trace: TracePayload): string {
  if (trace.verdict === null) {
    return "";
  }
  const intent = trace.verdict.intent_id ?? "none";
  return (
    `<h3>Verdict</h3><p>kind: <code>${escapeHtml(trace.verdict.kind)}</code>, ` +
    `intent: <code>${escapeHtml(intent)}</code></p>` +
    `<pre class="raw">${escapeHtml(trace.verdict.raw)}</pre>`
  );
}

export function renderTrace(decision: DecisionPayload | null): string {
  if (decision === null) {
    return '<p class="empty">Send a message to inspect its decision.</p>';
  }
  const head =
    `<p>${outcomeChip(decision.outcome)} ` +
    `intent: <code>${escapeHtml(decision.intent_id ?? "none")}</code>, ` +
    `confidence: <code>${formatNumber(decision.confidence)}</code></p>`;
  const trace = decision.trace;
  if (trace === undefined) {
    return head + '<p class="empty">trace not exposed by the service</p>';
  }
  return (
    head +
    `<p>gate rule: <code>${escapeHtml(trace.gate_rule)}</code></p>` +
    `<p>normalized: <code>${escapeHtml(trace.normalized_text)}</code></p>` +
    renderShortlist(trace) +
    renderPrompt(trace) +
    renderVerdict(trace)
  );
}

export function renderProbe(probe: ProbeResult | null): string {
  if (probe === null) {
    return '<p class="empty">Pick a text and move the slider to probe the gate.</p>';
  }
  const { decision } = probe;
  return (
    `<p>${outcomeChip(decision.outcome)} at threshold ` +
    `<code>${String(probe.value)}</code> for "${escapeHtml(probe.text)}"</p>` +
    `<p>intent: <code>${escapeHtml(decision.intent_id ?? "none")}</code>, ` +
    `confidence: <code>${formatNumber(decision.confidence)}</code></p>`
  );
}

export function renderNotice(message: string): string {
  return `<p class="notice">${escapeHtml(message)}</p>`;
}

export function renderError(message: string): string {
  return `<p class="error">${escapeHtml(message)}</p>`;
}
