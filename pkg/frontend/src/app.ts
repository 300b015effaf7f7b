/** DOM wiring for the designer. Pure logic lives in rules.ts/state.ts; this
 * module only renders and forwards events to the API client. */

import { ApiClient, ApiError } from "./api.js";
import { accuracyText, displayProb, literalText } from "./format.js";
import { CodebookDraft } from "./rules.js";
import { ValidationQueue } from "./state.js";
import type { PrentResponse } from "./types.js";

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const params = new URLSearchParams(window.location.search);
const api = new ApiClient(params.get("api") ?? "http://127.0.0.1:8000");

let draft = new CodebookDraft("my-codebook", {});
const queue = new ValidationQueue();
let sessionId = "";
let lastPlayground: PrentResponse | null = null;

function banner(message: string, kind: "error" | "ok" = "error"): void {
  const node = byId<HTMLDivElement>("banner");
  node.textContent = message;
  node.className = message ? `banner ${kind}` : "banner hidden";
  if (message && kind === "ok") setTimeout(() => banner(""), 4000);
}

async function guard<T>(work: () => Promise<T>): Promise<T | null> {
  try {
    const result = await work();
    banner("");
    return result;
  } catch (error) {
    if (error instanceof ApiError) banner(`${error.status}: ${error.detail}`);
    else banner(String(error));
    return null;
  }
}

/* ---------------- playground ---------------- */

function renderPlayground(): void {
  const container = byId<HTMLDivElement>("playground-results");
  container.replaceChildren();
  if (!lastPlayground) return;
  for (const [templateId, result] of Object.entries(lastPlayground.results)) {
    const section = el("div", "template-result");
    section.append(el("h4", "", `${templateId} — ${result.template_text}`));
    const list = el("div", "chips");
    for (const candidate of result.candidates) {
      const chip = el("span", candidate.entailed ? "chip entailed" : "chip");
      chip.append(
        el("b", "", candidate.token),
        el(
          "small",
          "",
          ` fill ${displayProb(candidate.fill_p)} · entail ${displayProb(candidate.entail_p)}`,
        ),
      );
      const include = el("button", "mini", "+");
      include.title = "require this token";
      include.onclick = () => addLiteralFromChip(templateId, candidate.token, false);
      const exclude = el("button", "mini", "−");
      exclude.title = "exclude this token";
      exclude.onclick = () => addLiteralFromChip(templateId, candidate.token, true);
      chip.append(" ", include, exclude);
      list.append(chip);
    }
    if (result.candidates.length === 0) list.append(el("i", "", "no candidates"));
    section.append(list);
    container.append(section);
  }
  for (const [templateId, message] of Object.entries(lastPlayground.errors)) {
    container.append(el("p", "error-text", `${templateId}: ${message}`));
  }
}

function addLiteralFromChip(templateId: string, token: string, negated: boolean): void {
  const typeName = byId<HTMLSelectElement>("target-type").value;
  if (!typeName) {
    banner("add an event type first, then select it as the target");
    return;
  }
  const clauseIndex = Number(byId<HTMLSelectElement>("target-clause").value);
  draft.addLiteral(typeName, clauseIndex, { template: templateId, token, negated });
  renderDraft();
}

async function runPlayground(): Promise<void> {
  const text = byId<HTMLTextAreaElement>("event-text").value.trim();
  if (!text) return;
  const response = await guard(() => api.prent(text));
  if (response) {
    lastPlayground = response;
    renderPlayground();
  }
}

async function previewTypes(): Promise<void> {
  const text = byId<HTMLTextAreaElement>("event-text").value.trim();
  if (!text) return;
  const problems = draft.validate();
  if (problems.length > 0) {
    banner(`draft not previewable: ${problems[0]}`);
    return;
  }
  const response = await guard(() => api.codeText(text, draft.toDocument()));
  if (response) {
    byId<HTMLSpanElement>("preview-types").textContent =
      response.types.length > 0 ? response.types.join(", ") : "(uncoded)";
  }
}

/* ---------------- rule builder ---------------- */

function renderTargets(): void {
  const typeSelect = byId<HTMLSelectElement>("target-type");
  const previous = typeSelect.value;
  typeSelect.replaceChildren(
    ...draft.eventTypes().map((name) => new Option(name, name, false, name === previous)),
  );
  renderTargetClauses();
}

function renderTargetClauses(): void {
  const typeSelect = byId<HTMLSelectElement>("target-type");
  const clauseSelect = byId<HTMLSelectElement>("target-clause");
  clauseSelect.replaceChildren();
  if (!typeSelect.value) return;
  draft.clauses(typeSelect.value).forEach((_, i) => {
    clauseSelect.append(new Option(`clause ${i + 1}`, String(i)));
  });
}

function renderDraft(): void {
  const container = byId<HTMLDivElement>("draft");
  container.replaceChildren();
  for (const typeName of draft.eventTypes()) {
    const card = el("div", "type-card");
    const head = el("div", "type-head");
    head.append(el("h4", "", typeName));
    const dropType = el("button", "mini danger", "remove type");
    dropType.onclick = () => {
      draft.removeEventType(typeName);
      renderDraft();
    };
    head.append(dropType);
    card.append(head);

    draft.clauses(typeName).forEach((clause, clauseIndex) => {
      const row = el("div", "clause");
      row.append(el("span", "clause-label", clauseIndex === 0 ? "IF" : "OR"));
      if (clause.length === 0) row.append(el("i", "", "empty clause"));
      clause.forEach((lit, literalIndex) => {
        if (literalIndex > 0) row.append(el("span", "and", "AND"));
        const chip = el("span", lit.negated ? "chip negated" : "chip");
        chip.append(el("b", "", literalText(lit.template, lit.token, lit.negated)));
        const flip = el("button", "mini", "¬");
        flip.title = "toggle exclusion";
        flip.onclick = () => {
          try {
            draft.toggleNegation(typeName, clauseIndex, literalIndex);
          } catch (error) {
            banner(String(error));
          }
          renderDraft();
        };
        const drop = el("button", "mini", "×");
        drop.onclick = () => {
          draft.removeLiteral(typeName, clauseIndex, literalIndex);
          renderDraft();
        };
        chip.append(" ", flip, drop);
        row.append(chip);
      });
      const dropClause = el("button", "mini", "drop clause");
      dropClause.onclick = () => {
        draft.removeClause(typeName, clauseIndex);
        renderDraft();
      };
      row.append(dropClause);
      card.append(row);
    });

    const addClause = el("button", "mini", "+ OR clause");
    addClause.onclick = () => {
      draft.addClause(typeName);
      renderDraft();
    };
    card.append(addClause);
    container.append(card);
  }

  const problems = draft.validate();
  const problemBox = byId<HTMLUListElement>("draft-problems");
  problemBox.replaceChildren(...problems.map((p) => el("li", "", p)));
  byId<HTMLButtonElement>("save-codebook").disabled = problems.length > 0;
  renderTargets();
}

async function saveCodebook(): Promise<void> {
  const name = byId<HTMLInputElement>("codebook-name").value.trim();
  if (!name) {
    banner("codebook name is empty");
    return;
  }
  draft.name = name;
  const stored = await guard(() => api.putCodebook(name, draft.toDocument()));
  if (stored) {
    banner(`saved codebook ${name}`, "ok");
    const link = byId<HTMLAnchorElement>("export-codebook");
    link.href = api.codebookExportUrl(name);
    link.classList.remove("hidden");
  }
}

async function loadCodebook(): Promise<void> {
  const name = byId<HTMLInputElement>("codebook-name").value.trim();
  const doc = await guard(() => api.getCodebook(name));
  if (doc) {
    draft = CodebookDraft.fromDocument(doc);
    renderDraft();
    banner(`loaded codebook ${name}`, "ok");
  }
}

/* ---------------- validation ---------------- */

function renderAccuracy(accuracy: Record<string, number>): void {
  const list = byId<HTMLUListElement>("accuracy");
  list.replaceChildren(...accuracyText(accuracy).map((line) => el("li", "", line)));
}

function renderQueue(): void {
  const container = byId<HTMLDivElement>("queue");
  container.replaceChildren();
  for (const eventId of queue.pendingIds()) {
    const entry = queue.entry(eventId);
    const card = el("div", "event-card");
    card.append(el("p", "event-text-body", entry.event.description));
    const types = el("div", "chips");
    for (const type of queue.visibleTypes(eventId)) {
      const label = el("label", "check");
      const box = el("input") as HTMLInputElement;
      box.type = "checkbox";
      box.checked = queue.isAccepted(eventId, type);
      box.onchange = () => queue.toggle(eventId, type);
      label.append(box, ` ${type}`);
      types.append(label);
    }
    if (queue.visibleTypes(eventId).length === 0) {
      types.append(el("i", "", "no suggestions"));
    }
    card.append(types);

    const manual = el("input") as HTMLInputElement;
    manual.placeholder = "add missing type";
    const addManual = el("button", "mini", "add");
    addManual.onclick = () => {
      if (manual.value.trim()) {
        queue.addManualType(eventId, manual.value.trim());
        manual.value = "";
        renderQueue();
      }
    };
    const submit = el("button", "", "submit decision");
    submit.onclick = async () => {
      submit.disabled = true;
      const accepted = queue.markSubmitted(eventId);
      const response = await guard(() => api.feedback(sessionId, eventId, accepted));
      if (response) {
        renderAccuracy(response.per_class_accuracy);
        byId<HTMLSpanElement>("labeled-count").textContent = String(response.labeled);
        queue.clearSubmitted();
        renderQueue();
      }
    };
    card.append(el("div", "row"), manual, addManual, submit);
    container.append(card);
  }
}

async function startSession(): Promise<void> {
  const id = byId<HTMLInputElement>("session-id").value.trim();
  const codebook = byId<HTMLInputElement>("codebook-name").value.trim();
  if (!id || !codebook) {
    banner("need a session id and a saved codebook name");
    return;
  }
  const created = await guard(async () => {
    try {
      return await api.createSession(id, codebook);
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        return await api.sessionStatus(id); // resume
      }
      throw error;
    }
  });
  if (created) {
    sessionId = id;
    const link = byId<HTMLAnchorElement>("export-session");
    link.href = api.sessionExportUrl(id);
    link.classList.remove("hidden");
    const status = await guard(() => api.sessionStatus(id));
    if (status) {
      renderAccuracy(status.per_class_accuracy);
      byId<HTMLSpanElement>("labeled-count").textContent = String(status.labeled);
    }
    banner(`session ${id} active`, "ok");
  }
}

async function sampleEvents(): Promise<void> {
  if (!sessionId) {
    banner("start a session first");
    return;
  }
  const n = Number(byId<HTMLInputElement>("sample-n").value) || 5;
  const response = await guard(() => api.sample(sessionId, n));
  if (response) {
    queue.enqueue(response.events);
    renderQueue();
  }
}

/* ---------------- boot ---------------- */

async function boot(): Promise<void> {
  byId<HTMLButtonElement>("run-playground").onclick = () => void runPlayground();
  byId<HTMLButtonElement>("preview").onclick = () => void previewTypes();
  byId<HTMLButtonElement>("add-type").onclick = () => {
    const input = byId<HTMLInputElement>("new-type");
    try {
      draft.addEventType(input.value.trim());
      input.value = "";
      renderDraft();
    } catch (error) {
      banner(String(error));
    }
  };
  byId<HTMLButtonElement>("save-codebook").onclick = () => void saveCodebook();
  byId<HTMLButtonElement>("load-codebook").onclick = () => void loadCodebook();
  byId<HTMLButtonElement>("start-session").onclick = () => void startSession();
  byId<HTMLButtonElement>("sample").onclick = () => void sampleEvents();
  byId<HTMLSelectElement>("target-type").onchange = renderTargetClauses;

  const health = await guard(() => api.health());
  if (health) {
    banner(`connected to ${api.baseUrl} (${health.backend} backend)`, "ok");
    const templates = await guard(() => api.templates());
    if (templates) {
      draft = new CodebookDraft(
        byId<HTMLInputElement>("codebook-name").value.trim() || "my-codebook",
        templates,
      );
      renderDraft();
    }
  }
}

void boot();
