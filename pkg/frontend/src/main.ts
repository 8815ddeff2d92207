// DOM glue. Everything interesting lives in state.ts / render.ts; this file
// only wires events, keeps at most one request in flight per pane, and
// repaints. Pass ?service=http://host:port to talk to a service on another
// origin (that origin must allow CORS); default is the page's own origin.

import { ServiceClient, ServiceError } from "./api.js";
import {
  createConsoleState,
  probeThreshold,
  selectDecision,
  sendMessage,
  setThreshold,
  type ConsoleState,
} from "./state.js";
import {
  renderError,
  renderNotice,
  renderProbe,
  renderTrace,
  renderTranscript,
} from "./render.js";

function element<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const transcriptEl = element<HTMLDivElement>("transcript");
const chatErrorEl = element<HTMLDivElement>("chat-error");
const chatForm = element<HTMLFormElement>("chat-form");
const chatInput = element<HTMLInputElement>("chat-input");
const sendButton = element<HTMLButtonElement>("send");
const traceEl = element<HTMLDivElement>("trace");
const probeTextInput = element<HTMLInputElement>("probe-text");
const slider = element<HTMLInputElement>("threshold");
const sliderValueEl = element<HTMLSpanElement>("threshold-value");
const probeResultEl = element<HTMLDivElement>("probe-result");
const serviceLabel = element<HTMLSpanElement>("service-url");

const baseUrl = new URLSearchParams(location.search).get("service") ?? "";
const client = new ServiceClient(baseUrl);
let state: ConsoleState = createConsoleState(baseUrl, Number(slider.value));

serviceLabel.textContent = baseUrl === "" ? "same origin" : baseUrl;

let chatBusy = false;
let probeBusy = false;
let probeDirty = false;

function repaintChat(): void {
  transcriptEl.innerHTML = renderTranscript(state.transcript);
  transcriptEl.scrollTop = transcriptEl.scrollHeight;
  traceEl.innerHTML = renderTrace(state.selected);
}

function repaintProbe(): void {
  sliderValueEl.textContent = state.threshold.toFixed(2);
  probeResultEl.innerHTML = renderProbe(state.probe);
}

async function onSend(event: SubmitEvent): Promise<void> {
  event.preventDefault();
  const text = chatInput.value.trim();
  if (text === "" || chatBusy) {
    return;
  }
  chatBusy = true;
  sendButton.disabled = true;
  chatErrorEl.hidden = true;
  try {
    state = await sendMessage(state, client, text);
    chatInput.value = "";
    if (probeTextInput.value === "") {
      probeTextInput.value = text;
    }
    repaintChat();
  } catch (err) {
    chatErrorEl.innerHTML = renderError(describe(err));
    chatErrorEl.hidden = false;
  } finally {
    chatBusy = false;
    sendButton.disabled = false;
    chatInput.focus();
  }
}

function runProbe(): void {
  const text = probeTextInput.value.trim();
  if (text === "") {
    probeResultEl.innerHTML = renderNotice("enter a text to probe");
    return;
  }
  if (probeBusy) {
    probeDirty = true;
    return;
  }
  probeBusy = true;
  probeThreshold(state, client, text)
    .then((next) => {
      state = next;
      repaintProbe();
    })
    .catch((err) => {
      if (err instanceof ServiceError && err.status === 403) {
        probeResultEl.innerHTML = renderNotice("override disabled");
      } else {
        probeResultEl.innerHTML = renderError(describe(err));
      }
    })
    .finally(() => {
      probeBusy = false;
      if (probeDirty) {
        probeDirty = false;
        runProbe();
      }
    });
}

function describe(err: unknown): string {
  if (err instanceof ServiceError) {
    return `service error ${err.status}: ${err.message}`;
  }
  return err instanceof Error ? err.message : String(err);
}

async function onTranscriptClick(event: MouseEvent): Promise<void> {
  const target = event.target as HTMLElement | null;
  const exchange = target?.closest<HTMLElement>("[data-decision]");
  if (!exchange) {
    return;
  }
  const decisionId = Number(exchange.dataset.decision);
  try {
    state = selectDecision(state, await client.decision(decisionId));
    traceEl.innerHTML = renderTrace(state.selected);
  } catch (err) {
    traceEl.innerHTML = renderError(describe(err));
  }
}

chatForm.addEventListener("submit", (event) => {
  void onSend(event);
});
transcriptEl.addEventListener("click", (event) => {
  void onTranscriptClick(event);
});
slider.addEventListener("input", () => {
  state = setThreshold(state, Number(slider.value));
  sliderValueEl.textContent = state.threshold.toFixed(2);
  runProbe();
});
probeTextInput.addEventListener("change", runProbe);

repaintChat();
repaintProbe();
