import { describe, expect, it } from "vitest";

import type { DecisionPayload } from "../src/api.js";
import {
  escapeHtml,
  renderError,
  renderNotice,
  renderProbe,
  renderTrace,
  renderTranscript,
} from "../src/render.js";

const VECTOR_DECISION: DecisionPayload = {
  outcome: "in_scope",
  intent_id: "pin_change",
  confidence: 0.8125,
  trace: {
    normalized_text: "ako si zmenim pin",
    gate_rule: "score_above_threshold",
    shortlist: [
      { intent_id: "pin_change", score: 0.8125 },
      { intent_id: "card_block", score: 0.30000000000000004 },
    ],
    prompt: null,
    verdict: null,
  },
};

const RERANK_DECISION: DecisionPayload = {
  outcome: "out_of_scope",
  intent_id: null,
  confidence: null,
  trace: {
    normalized_text: "nieco uplne ine",
    gate_rule: "verdict_invalid",
    shortlist: [{ intent_id: "card_block", score: 0.41 }],
    prompt: {
      template_id: "sk-system-v1",
      options: [
        { position: 1, letter: "a", intent_id: "card_block", label: "card_block" },
        { position: 2, letter: "b", intent_id: null, label: "invalid" },
      ],
      rendered: [
        { role: "system", content: "Si asistent banky." },
        { role: "user", content: "Vyber moznost.\n1. (a) card_block" },
      ],
    },
    verdict: { kind: "invalid", intent_id: null, raw: "b" },
  },
};

describe("escapeHtml", () => {
  it("neutralizes markup and quotes", () => {
    expect(escapeHtml('<b onclick="x">&\'</b>')).toBe(
      "&lt;b onclick=&quot;x&quot;&gt;&amp;&#39;&lt;/b&gt;",
    );
  });

  it("leaves Slovak text alone", () => {
    expect(escapeHtml("zmeniť účet")).toBe("zmeniť účet");
  });
});

describe("renderTranscript", () => {
  it("shows a hint while empty", () => {
    expect(renderTranscript([])).toContain("No messages yet");
  });

  it("renders the bot response verbatim inside the bubble", () => {
    const html = renderTranscript([
      {
        user: "chcem si zablokovať kartu",
        response: "Kartu zablokujete v aplikácii.",
        decisionId: 5,
        outcome: "in_scope",
      },
    ]);
    expect(html).toContain("Kartu zablokujete v aplikácii.");
    expect(html).toContain("chcem si zablokovať kartu");
    expect(html).toContain('data-decision="5"');
    expect(html).not.toContain("badge");
  });

  it("badges out-of-scope answers", () => {
    const html = renderTranscript([
      { user: "x", response: "fallback", decisionId: 1, outcome: "out_of_scope" },
    ]);
    expect(html).toContain('<span class="badge">out of scope</span>');
    expect(html).toContain('bubble bot oos');
  });

  it("escapes hostile user input", () => {
    const html = renderTranscript([
      { user: "<script>alert(1)</script>", response: "r", decisionId: 1 },
    ]);
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

describe("renderTrace", () => {
  it("prints the service's figures without reformatting", () => {
    const html = renderTrace(VECTOR_DECISION);
    expect(html).toContain("0.8125");
    expect(html).toContain("0.30000000000000004");
    expect(html).toContain("score_above_threshold");
    expect(html).toContain("ako si zmenim pin");
    expect(html).toContain("chip-in");
  });

  it("shows prompt options and the raw verdict in rerank traces", () => {
    const html = renderTrace(RERANK_DECISION);
    expect(html).toContain("sk-system-v1");
    expect(html).toContain("1. (a) card_block");
    expect(html).toContain("2. (b) invalid");
    expect(html).toContain("verdict_invalid");
    expect(html).toContain('<pre class="raw">b</pre>');
    expect(html).toContain("chip-out");
  });

  it("escapes rendered prompt content", () => {
    const decision: DecisionPayload = {
      ...RERANK_DECISION,
      trace: {
        ...RERANK_DECISION.trace!,
        prompt: {
          template_id: "t",
          options: [],
          rendered: [{ role: "user", content: "<img src=x>" }],
        },
      },
    };
    expect(renderTrace(decision)).toContain("&lt;img src=x&gt;");
  });

  it("handles null confidence and a hidden trace", () => {
    const html = renderTrace({
      outcome: "out_of_scope",
      intent_id: null,
      confidence: null,
    });
    expect(html).toContain("n/a");
    expect(html).toContain("trace not exposed");
  });

  it("prompts for a message when nothing is selected", () => {
    expect(renderTrace(null)).toContain("Send a message");
  });
});

describe("renderProbe", () => {
  it("shows the outcome chip for the probed threshold", () => {
    const html = renderProbe({
      text: "chcem uver",
      value: 0,
      decision: { outcome: "in_scope", intent_id: "loan", confidence: 0.61 },
    });
    expect(html).toContain("chip-in");
    expect(html).toContain("0.61");
    expect(html).toContain(">0<");
    expect(html).toContain("chcem uver");
  });

  it("flips the chip for an out-of-scope verdict", () => {
    const html = renderProbe({
      text: "chcem uver",
      value: 1,
      decision: { outcome: "out_of_scope", intent_id: null, confidence: 0.61 },
    });
    expect(html).toContain("chip-out");
    expect(html).toContain(">1<");
  });

  it("hints at the controls while idle", () => {
    expect(renderProbe(null)).toContain("move the slider");
  });
});

describe("banners", () => {
  it("escape their message", () => {
    expect(renderError("boom <& done>")).toBe(
      '<p class="error">boom &lt;&amp; done&gt;</p>',
    );
    expect(renderNotice("override disabled")).toBe(
      '<p class="notice">override disabled</p>',
    );
  });
});
