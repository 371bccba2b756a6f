import { describe, expect, test } from "vitest";

import type { OutcomeMessage, StateMessage } from "../src/protocol.js";
import { parseServerMessage } from "../src/protocol.js";
import {
    initialViewState,
    intentForClick,
    reduce,
    replay,
    splitForDisplay,
    type UiEvent,
} from "../src/state.js";

function stateMsg(overrides: Partial<StateMessage> = {}): StateMessage {
    return {
        type: "state",
        session: "sess-1",
        design: "design1",
        fsm_state: "crop_or_switch",
        prompts: { short: "in", long: "cooperate" },
        rect: { x: 0, y: 0, w: 1024, h: 768 },
        screen: { x: 0, y: 0, w: 1024, h: 768 },
        ...overrides,
    };
}

function outcomeMsg(overrides: Partial<OutcomeMessage> = {}): OutcomeMessage {
    return {
        type: "outcome",
        session: "sess-1",
        intended: "short",
        decoded: "short",
        correct: true,
        actions: [{ action: "crop_applied", rect: { x: 0, y: 0, w: 512, h: 768 } }],
        stats: { decodes: 1, correct: 1, accuracy: 1, itr_bpm: 30 },
        ...overrides,
    };
}

describe("reducer", () => {
    test("state message mirrors server fields", () => {
        const view = reduce(initialViewState(), { kind: "server", message: stateMsg() });
        expect(view.session).toBe("sess-1");
        expect(view.design).toBe("design1");
        expect(view.fsmState).toBe("crop_or_switch");
        expect(view.rect).toEqual({ x: 0, y: 0, w: 1024, h: 768 });
        expect(view.prompts).toEqual({ short: "in", long: "cooperate" });
        expect(view.pending).toBe(false);
    });

    test("intent locks input until the outcome lands", () => {
        let view = reduce(initialViewState(), { kind: "server", message: stateMsg() });
        view = reduce(view, { kind: "intent_sent", value: "long" });
        expect(view.pending).toBe(true);
        // a second click while pending is ignored
        const locked = reduce(view, { kind: "intent_sent", value: "short" });
        expect(locked).toBe(view);
        view = reduce(view, { kind: "server", message: outcomeMsg() });
        expect(view.pending).toBe(false);
        expect(view.stats?.decodes).toBe(1);
        expect(view.log).toHaveLength(1);
    });

    test("stats come from the server untouched", () => {
        const stats = { decodes: 7, correct: 5, accuracy: 0.714, itr_bpm: 5.4 };
        const view = replay([
            { kind: "server", message: stateMsg() },
            { kind: "server", message: outcomeMsg({ stats }) },
        ]);
        expect(view.stats).toEqual(stats);
    });

    test("error message raises the banner and unlocks", () => {
        let view = reduce(initialViewState(), { kind: "server", message: stateMsg() });
        view = reduce(view, { kind: "intent_sent", value: "short" });
        view = reduce(view, { kind: "server", message: { type: "error", error: "boom" } });
        expect(view.error).toBe("boom");
        expect(view.pending).toBe(false);
    });

    test("network failure offers a retry of the unacknowledged intent", () => {
        let view = reduce(initialViewState(), { kind: "server", message: stateMsg() });
        view = reduce(view, { kind: "intent_sent", value: "long" });
        view = reduce(view, { kind: "network_error", detail: "socket closed" });
        expect(view.error).toContain("retry");
        expect(view.unacknowledged).toBe("long");
        view = reduce(view, { kind: "retry" });
        expect(view.pending).toBe(true);
        expect(view.error).toBeNull();
    });

    test("replaying the same log reproduces the same screen state", () => {
        const log: UiEvent[] = [
            { kind: "server", message: stateMsg() },
            { kind: "intent_sent", value: "short" },
            { kind: "server", message: outcomeMsg() },
            { kind: "server", message: stateMsg({ fsm_state: "crop_rectangle" }) },
            { kind: "intent_sent", value: "long" },
            {
                kind: "server",
                message: outcomeMsg({ intended: "long", decoded: "short", correct: false }),
            },
        ];
        const a = replay(log);
        const b = replay(log);
        expect(a).toEqual(b);
        expect(a.lastOutcome?.correct).toBe(false);
        expect(a.log).toHaveLength(2);
    });
});

describe("display split and click mapping", () => {
    test("wide rectangles split vertically, short side is left", () => {
        const { vertical, first, second } = splitForDisplay({ x: 0, y: 0, w: 1024, h: 768 });
        expect(vertical).toBe(true);
        expect(first).toEqual({ x: 0, y: 0, w: 512, h: 768 });
        expect(second).toEqual({ x: 512, y: 0, w: 512, h: 768 });
    });

    test("tall rectangles split horizontally, short side is top", () => {
        const { vertical, first } = splitForDisplay({ x: 512, y: 0, w: 512, h: 768 });
        expect(vertical).toBe(false);
        expect(first).toEqual({ x: 512, y: 0, w: 512, h: 384 });
    });

    test("odd pixel goes to the first half", () => {
        const { first, second } = splitForDisplay({ x: 0, y: 0, w: 5, h: 3 });
        expect(first.w).toBe(3);
        expect(second.w).toBe(2);
    });

    test("clicks map left/top to short and right/bottom to long", () => {
        const rect = { x: 0, y: 0, w: 1024, h: 768 };
        expect(intentForClick(rect, 100, 100)).toBe("short");
        expect(intentForClick(rect, 900, 100)).toBe("long");
        expect(intentForClick({ x: 512, y: 0, w: 512, h: 768 }, 600, 100)).toBe("short");
        expect(intentForClick({ x: 512, y: 0, w: 512, h: 768 }, 600, 700)).toBe("long");
        expect(intentForClick(rect, 2000, 100)).toBeNull();
    });
});

describe("message parsing", () => {
    test("valid kinds pass", () => {
        expect(parseServerMessage(JSON.stringify(stateMsg())).type).toBe("state");
        expect(parseServerMessage('{"type":"error","error":"x"}').type).toBe("error");
    });

    test("malformed payloads throw", () => {
        expect(() => parseServerMessage("{nope")).toThrow(/malformed/);
        expect(() => parseServerMessage('{"type":"surprise"}')).toThrow(/unknown type/);
        expect(() => parseServerMessage('"just a string"')).toThrow(/malformed/);
    });
});
