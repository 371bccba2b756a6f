// Protocol conformance against the real served backend: a scripted
// WebSocket client drives a session and must reproduce the headless
// `simulate` transcript for the same seed and intents.
//
// Requires python3 with the backend package installed; run via
// `npm test` (NODE_OPTIONS=--experimental-websocket provides the client).

import { spawn, spawnSync, type ChildProcess } from "node:child_process";
import { mkdtempSync, readFileSync, rmSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, test } from "vitest";

import type { OutcomeMessage, ServerMessage, StateMessage } from "../src/protocol.js";

const SEED = 17;
const INTENTS: Array<"short" | "long"> = [
    "short", "long", "short", "short", "long", "long", "short", "long",
];
const PORT = 8931 + Math.floor(Math.random() * 500);
const BASE = `http://127.0.0.1:${PORT}`;

let workDir: string;
let dataPath: string;
let serverProc: ChildProcess | null = null;

function python(args: string[]): void {
    const result = spawnSync("python3", ["-m", "isbci.cli", ...args], { encoding: "utf-8" });
    if (result.status !== 0) {
        throw new Error(`backend command failed: ${args[0]}: ${result.stderr}`);
    }
}

function headlessTranscript(design: "1" | "2"): Array<Record<string, unknown>> {
    const intentsPath = join(workDir, "intents.txt");
    writeFileSync(intentsPath, INTENTS.join("\n") + "\n");
    const out = join(workDir, `transcript-d${design}.jsonl`);
    python([
        "simulate", "--data", dataPath, "--design", design,
        "--intents", intentsPath, "--decoder", "oracle",
        "--seed", String(SEED), "--out", out,
    ]);
    return readFileSync(out, "utf-8")
        .trim()
        .split("\n")
        .slice(1) // first line is the embedded config
        .map((line) => JSON.parse(line) as Record<string, unknown>);
}

async function waitForServer(): Promise<void> {
    for (let attempt = 0; attempt < 100; attempt++) {
        try {
            const resp = await fetch(`${BASE}/api`, {
                method: "POST",
                body: JSON.stringify({ type: "ping" }),
            });
            if (resp.ok || resp.status === 400) {
                return;
            }
        } catch {
            // not up yet
        }
        await new Promise((r) => setTimeout(r, 100));
    }
    throw new Error("backend server did not come up");
}

beforeAll(async () => {
    workDir = mkdtempSync(join(tmpdir(), "isbci-ui-"));
    dataPath = join(workDir, "conformance.isbc");
    python([
        "gen-data", "--n-per-class", "30", "--channels", "4", "--samples", "32",
        "--classes", "2", "--separation", "2.0", "--seed", "3", "--out", dataPath,
    ]);
    serverProc = spawn("python3", [
        "-m", "isbci.cli", "serve", "--data", dataPath,
        "--decoder", "oracle", "--port", String(PORT),
    ], { stdio: "ignore" });
    await waitForServer();
}, 60_000);

afterAll(() => {
    serverProc?.kill();
    rmSync(workDir, { recursive: true, force: true });
});

class WsSession {
    private socket!: WebSocket;
    private queue: ServerMessage[] = [];
    private waiters: Array<(msg: ServerMessage) => void> = [];

    async open(): Promise<void> {
        this.socket = new WebSocket(`ws://127.0.0.1:${PORT}/ws`);
        this.socket.addEventListener("message", (event) => {
            const message = JSON.parse(String(event.data)) as ServerMessage;
            const waiter = this.waiters.shift();
            if (waiter) {
                waiter(message);
            } else {
                this.queue.push(message);
            }
        });
        await new Promise<void>((resolve, reject) => {
            this.socket.addEventListener("open", () => resolve());
            this.socket.addEventListener("error", () => reject(new Error("ws failed")));
        });
    }

    next(): Promise<ServerMessage> {
        const queued = this.queue.shift();
        if (queued) {
            return Promise.resolve(queued);
        }
        return new Promise((resolve) => this.waiters.push(resolve));
    }

    send(message: Record<string, unknown>): void {
        this.socket.send(JSON.stringify(message));
    }

    close(): void {
        this.socket.close();
    }
}

function comparable(outcome: Record<string, unknown>): Record<string, unknown> {
    // session ids differ between served and headless runs; everything else
    // is part of the deterministic contract
    const { session: _session, ...rest } = outcome;
    return rest;
}

async function driveSession(design: "design1" | "design2"): Promise<{
    outcomes: OutcomeMessage[];
    states: StateMessage[];
}> {
    const ws = new WsSession();
    await ws.open();
    ws.send({ type: "start", design, seed: SEED });
    const initial = (await ws.next()) as StateMessage;
    expect(initial.type).toBe("state");
    const outcomes: OutcomeMessage[] = [];
    const states: StateMessage[] = [initial];
    for (const value of INTENTS) {
        ws.send({ type: "intent", session: initial.session, value });
        outcomes.push((await ws.next()) as OutcomeMessage);
        states.push((await ws.next()) as StateMessage);
    }
    ws.close();
    return { outcomes, states };
}

describe("websocket client vs headless transcript", () => {
    test.each([
        ["design1", "1"],
        ["design2", "2"],
    ] as const)("%s reproduces the simulate transcript", async (design, flag) => {
        const expected = headlessTranscript(flag);
        const { outcomes, states } = await driveSession(design);

        expect(outcomes).toHaveLength(expected.length);
        for (let i = 0; i < expected.length; i++) {
            expect(comparable(outcomes[i] as unknown as Record<string, unknown>))
                .toEqual(comparable(expected[i]));
        }
        // every outcome is followed by a state carrying the normative fields
        for (const state of states) {
            expect(state.type).toBe("state");
            expect(state.prompts.short).toBeTypeOf("string");
            expect(state.prompts.long).toBeTypeOf("string");
            if (design === "design1") {
                expect(state.rect).toBeDefined();
            } else {
                expect(state.tree).toBeDefined();
            }
        }
    }, 30_000);

    test("http fallback yields the same outcomes as the websocket", async () => {
        const ws = await driveSession("design1");
        const start = await fetch(`${BASE}/api`, {
            method: "POST",
            body: JSON.stringify({ type: "start", design: "design1", seed: SEED }),
        }).then((r) => r.json()) as ServerMessage[];
        const session = (start[0] as StateMessage).session;
        for (let i = 0; i < INTENTS.length; i++) {
            const replies = await fetch(`${BASE}/api`, {
                method: "POST",
                body: JSON.stringify({ type: "intent", session, value: INTENTS[i] }),
            }).then((r) => r.json()) as ServerMessage[];
            expect(replies.map((m) => m.type)).toEqual(["outcome", "state"]);
            expect(comparable(replies[0] as unknown as Record<string, unknown>))
                .toEqual(comparable(ws.outcomes[i] as unknown as Record<string, unknown>));
        }
    }, 30_000);
});
