/** End-to-end: design a codebook through the client the way the UI does,
 * save and export it, and check that the batch CLI reproduces the exact type
 * assignments the UI preview showed. Needs the Python package installed
 * (`prent` on PATH); the service is spawned on a scratch port. */

import { execFile, spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { promisify } from "node:util";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { CodebookDraft } from "../src/rules.js";
import { ValidationQueue } from "../src/state.js";

const run = promisify(execFile);
const PORT = 8900 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let server: ChildProcess;
let workdir: string;
const api = new ApiClient(BASE);

async function waitForServer(): Promise<void> {
  const deadline = Date.now() + 30_000;
  while (Date.now() < deadline) {
    try {
      await api.health();
      return;
    } catch {
      await new Promise((resolve) => setTimeout(resolve, 300));
    }
  }
  throw new Error("service did not come up");
}

beforeAll(async () => {
  workdir = mkdtempSync(join(tmpdir(), "designer-e2e-"));
  server = spawn("prent", ["serve", "--port", String(PORT)], {
    env: { ...process.env, PRENT_DATA_DIR: join(workdir, "state") },
    stdio: "ignore",
  });
  await waitForServer();
}, 40_000);

afterAll(() => {
  server?.kill();
});

/** Build a draft the way the playground flow does: query candidates for a
 * canonical description and lift entailed tokens into literals. */
async function designCodebook(): Promise<CodebookDraft> {
  const templates = await api.templates();
  const draft = new CodebookDraft("designer-e2e", templates);

  const pickEntailed = async (text: string, templateId: string): Promise<string[]> => {
    const response = await api.prent(text, [templateId]);
    return response.results[templateId].candidates
      .filter((c) => c.entailed)
      .map((c) => c.token);
  };

  draft.addEventType("Kidnapping");
  const kidnapTokens = await pickEntailed("Two men were kidnapped by rebels.", "involves");
  expect(kidnapTokens).toContain("kidnapping");
  draft.addLiteral("Kidnapping", 0, { template: "involves", token: "kidnapping", negated: false });
  const clause2 = draft.addClause("Kidnapping");
  draft.addLiteral("Kidnapping", clause2, { template: "people_were", token: "kidnapped", negated: false });
  const clause3 = draft.addClause("Kidnapping");
  draft.addLiteral("Kidnapping", clause3, { template: "people_were", token: "abducted", negated: false });

  draft.addEventType("Killing");
  const killTokens = await pickEntailed("Gunmen killed two villagers in Melan.", "involves");
  expect(killTokens).toContain("killing");
  draft.addLiteral("Killing", 0, { template: "involves", token: "killing", negated: false });

  draft.addEventType("Arrest");
  const arrestTokens = await pickEntailed("Police arrested three activists in Korda.", "people_were");
  expect(arrestTokens).toContain("arrested");
  draft.addLiteral("Arrest", 0, { template: "people_were", token: "arrested", negated: false });
  // exclusion toggle: require "kidnapped" to be absent
  draft.addLiteral("Arrest", 0, { template: "people_were", token: "kidnapped", negated: false });
  draft.toggleNegation("Arrest", 0, 1);

  draft.addEventType("Protest");
  draft.addLiteral("Protest", 0, { template: "involves", token: "protest", negated: false });
  const protestOr = draft.addClause("Protest");
  draft.addLiteral("Protest", protestOr, { template: "involves", token: "demonstration", negated: false });

  expect(draft.validate()).toEqual([]);
  return draft;
}

describe("designer end-to-end", () => {
  it("UI-designed codebook, exported and run via the CLI, matches the preview", async () => {
    const draft = await designCodebook();
    await api.putCodebook(draft.name, draft.toDocument());

    // the preview the UI shows: coding the demo corpus through the service
    const preview = await api.codeCorpus("demo", draft.name);
    expect(preview.coded.length).toBeGreaterThanOrEqual(20);
    const previewById = new Map(preview.coded.map((e) => [e.event_id, e.types]));
    expect(previewById.get("demo-kidnap")).toEqual(["Kidnapping"]);

    // export the codebook and run the batch CLI on the same corpus
    const exported = await fetch(api.codebookExportUrl(draft.name));
    expect(exported.ok).toBe(true);
    const codebookPath = join(workdir, "exported-codebook.json");
    writeFileSync(codebookPath, await exported.text());

    const { stdout: corpusPath } = await run("python3", [
      "-c",
      "from prent.config import DEMO_CORPUS; print(DEMO_CORPUS, end='')",
    ]);
    const outPath = join(workdir, "cli-coded.jsonl");
    await run("prent", [
      "code", "--input", corpusPath, "--codebook", codebookPath, "--out", outPath,
    ]);

    const cliCoded = readFileSync(outPath, "utf-8")
      .trim()
      .split("\n")
      .map((line) => JSON.parse(line) as { event_id: string; types: string[] });
    expect(cliCoded).toHaveLength(preview.coded.length);
    for (const entry of cliCoded) {
      expect(entry.types, entry.event_id).toEqual(previewById.get(entry.event_id));
    }
  }, 120_000);

  it("accept-all validation round reports per-class accuracy 1.0", async () => {
    await api.createSession("e2e-session", "designer-e2e", "demo", 11);
    const queue = new ValidationQueue();
    const { events } = await api.sample("e2e-session", 5);
    expect(events).toHaveLength(5);
    queue.enqueue(events);

    let lastAccuracy: Record<string, number> = {};
    for (const event of events) {
      const accepted = queue.markSubmitted(event.event_id);
      expect(accepted).toEqual([...event.suggested].sort());
      const response = await api.feedback("e2e-session", event.event_id, accepted);
      lastAccuracy = response.per_class_accuracy;
    }
    const status = await api.sessionStatus("e2e-session");
    expect(status.labeled).toBe(5);
    expect(Object.keys(lastAccuracy).length).toBeGreaterThan(0);
    for (const value of Object.values(lastAccuracy)) {
      expect(value).toBe(1.0);
    }
  }, 60_000);

  it("duplicate submission is blocked client-side and rejected server-side", async () => {
    const { events } = await api.sample("e2e-session", 1);
    const queue = new ValidationQueue();
    queue.enqueue(events);
    const accepted = queue.markSubmitted(events[0].event_id);
    await api.feedback("e2e-session", events[0].event_id, accepted);

    expect(() => queue.markSubmitted(events[0].event_id)).toThrow(/already submitted/);
    await expect(
      api.feedback("e2e-session", events[0].event_id, accepted),
    ).rejects.toMatchObject({ status: 409 });
  }, 60_000);
});
