// @vitest-environment happy-dom
import { beforeEach, describe, expect, test, vi } from "vitest";

import { render, type Handlers } from "../src/render.js";
import { initialViewState, replay, type UiEvent, type ViewState } from "../src/state.js";
import type { OutcomeMessage, StateMessage } from "../src/protocol.js";

function stateMsg(overrides: Partial<StateMessage> = {}): StateMessage {
    return {
        type: "state",
        session: "sess-1",
        design: "design1",
        fsm_state: "crop_rectangle",
        prompts: { short: "up", long: "independent" },
        rect: { x: 0, y: 0, w: 1024, h: 768 },
        screen: { x: 0, y: 0, w: 1024, h: 768 },
        ...overrides,
    };
}

function treeState(fsmState: string): StateMessage {
    return stateMsg({
        design: "design2",
        fsm_state: fsmState,
        rect: undefined,
        screen: undefined,
        tree: {
            nodes: {
                name: "desktop",
                children: [
                    { name: "documents", children: [{ name: "notes", children: [] }] },
                    { name: "music", children: [] },
                ],
            },
            cursor: [0],
        },
    });
}

function outcomeMsg(overrides: Partial<OutcomeMessage> = {}): OutcomeMessage {
    return {
        type: "outcome",
        session: "sess-1",
        intended: "long",
        decoded: "long",
        correct: true,
        actions: [],
        stats: { decodes: 2, correct: 1, accuracy: 0.5, itr_bpm: 0 },
        ...overrides,
    };
}

let root: HTMLElement;
let handlers: Handlers;

beforeEach(() => {
    document.body.innerHTML = "<div id='view'></div>";
    root = document.getElementById("view") as HTMLElement;
    handlers = { onIntent: vi.fn(), onRetry: vi.fn(), onDismiss: vi.fn() };
});

function q(testid: string): HTMLElement | null {
    return root.querySelector(`[data-testid="${testid}"]`);
}

describe("design 1 rendering", () => {
    test("vertical split puts the short-word card in the left half", () => {
        const view = replay([{ kind: "server", message: stateMsg() }]);
        render(view, root, handlers);
        const shortHalf = q("half-short")!;
        const longHalf = q("half-long")!;
        expect(shortHalf.style.left).toBe("0px");
        expect(longHalf.style.left).toBe("256px"); // 512 virtual px at half scale
        expect(shortHalf.querySelector(".card-word")?.textContent).toBe("up");
        expect(longHalf.querySelector(".card-word")?.textContent).toBe("independent");
    });

    test("horizontal split puts the short-word card on top", () => {
        const view = replay([
            { kind: "server", message: stateMsg({ rect: { x: 512, y: 0, w: 512, h: 768 } }) },
        ]);
        render(view, root, handlers);
        expect(q("half-short")!.style.top).toBe("0px");
        expect(q("half-long")!.style.top).toBe("192px"); // 384 virtual px scaled
    });

    test("crop-or-switch state shows choice cards, short card first", () => {
        const view = replay([
            { kind: "server", message: stateMsg({ fsm_state: "crop_or_switch" }) },
        ]);
        render(view, root, handlers);
        const cards = q("cards")!;
        expect(cards.children[0].className).toContain("short-card");
        expect(cards.children[1].className).toContain("long-card");
        expect(q("half-short")).toBeNull(); // no split preview outside the crop state
    });

    test("clicking the halves and cards submits the matching intents", () => {
        const view = replay([{ kind: "server", message: stateMsg() }]);
        render(view, root, handlers);
        (q("half-short") as HTMLElement).click();
        (q("half-long") as HTMLElement).click();
        (q("card-long") as HTMLElement).click();
        expect(handlers.onIntent).toHaveBeenNthCalledWith(1, "short");
        expect(handlers.onIntent).toHaveBeenNthCalledWith(2, "long");
        expect(handlers.onIntent).toHaveBeenNthCalledWith(3, "long");
    });

    test("input is ignored while a step is in flight", () => {
        const view = replay([
            { kind: "server", message: stateMsg() },
            { kind: "intent_sent", value: "short" },
        ]);
        render(view, root, handlers);
        expect(q("main")!.className).toContain("locked");
        (q("half-short") as HTMLElement).click();
        expect(handlers.onIntent).not.toHaveBeenCalled();
    });

    test("fig-3 style click-through: long then short keeps the short card left/top", () => {
        // crop state on the full screen, pick the right half, then its top half
        const events: UiEvent[] = [{ kind: "server", message: stateMsg() }];
        let view = replay(events);
        render(view, root, handlers);
        expect(q("half-short")!.style.left).toBe("0px");
        (q("half-long") as HTMLElement).click();
        expect(handlers.onIntent).toHaveBeenLastCalledWith("long");

        events.push({ kind: "intent_sent", value: "long" });
        events.push({ kind: "server", message: outcomeMsg() });
        events.push({
            kind: "server",
            message: stateMsg({ rect: { x: 512, y: 0, w: 512, h: 768 } }),
        });
        view = replay(events);
        render(view, root, handlers);
        expect(q("half-short")!.style.top).toBe("0px"); // short card now on top
        (q("half-short") as HTMLElement).click();
        expect(handlers.onIntent).toHaveBeenLastCalledWith("short");

        events.push({ kind: "intent_sent", value: "short" });
        events.push({ kind: "server", message: outcomeMsg({ intended: "short", decoded: "short" }) });
        events.push({
            kind: "server",
            message: stateMsg({ rect: { x: 512, y: 0, w: 512, h: 384 } }),
        });
        view = replay(events);
        render(view, root, handlers);
        const rect = q("crop-rect")!;
        expect(rect.style.left).toBe("256px");
        expect(rect.style.width).toBe("256px");
        expect(rect.style.height).toBe("192px");
    });
});

describe("design 2 rendering", () => {
    test("badge shows the machine state and the cursor is highlighted", () => {
        render(replay([{ kind: "server", message: treeState("A") }]), root, handlers);
        expect(q("state-badge")!.textContent).toBe("A");
        expect(q("tree-cursor")!.textContent).toBe("documents");
    });

    test.each(["A", "B", "C", "D"])("state %s renders its badge", (s) => {
        render(replay([{ kind: "server", message: treeState(s) }]), root, handlers);
        expect(q("state-badge")!.textContent).toBe(s);
    });
});

describe("panels", () => {
    test("stats panel shows only server-provided numbers", () => {
        const view = replay([
            { kind: "server", message: stateMsg() },
            {
                kind: "server",
                message: outcomeMsg({
                    stats: { decodes: 9, correct: 6, accuracy: 0.6667, itr_bpm: 3.2 },
                }),
            },
        ]);
        render(view, root, handlers);
        const text = q("stats")!.textContent ?? "";
        expect(text).toContain("9");
        expect(text).toContain("66.7%");
        expect(text).toContain("3.2 bits/min");
    });

    test("a wrong decode surfaces the mismatch and the recovery affordance", () => {
        const view = replay([
            { kind: "server", message: stateMsg() },
            {
                kind: "server",
                message: outcomeMsg({ intended: "short", decoded: "long", correct: false }),
            },
        ]);
        render(view, root, handlers);
        const note = q("mismatch")!;
        expect(note.textContent).toContain('decoded "long"');
        expect(note.textContent).toContain("switch state");
    });

    test("malformed message raises the banner; retry only when something is pending", () => {
        let view = replay([
            { kind: "server", message: stateMsg() },
            { kind: "server", message: { type: "error", error: "malformed message" } },
        ]);
        render(view, root, handlers);
        expect(q("banner")!.textContent).toContain("malformed message");
        expect(q("retry")).toBeNull();

        view = replay([
            { kind: "server", message: stateMsg() },
            { kind: "intent_sent", value: "short" },
            { kind: "network_error", detail: "offline" },
        ]);
        render(view, root, handlers);
        (q("retry") as HTMLElement).click();
        expect(handlers.onRetry).toHaveBeenCalled();
    });

    test("no session yet shows the idle hint", () => {
        render(initialViewState(), root, handlers);
        expect(root.textContent).toContain("no session");
    });

    test("rendering is a pure view of the state: same state, same markup", () => {
        const view: ViewState = replay([
            { kind: "server", message: stateMsg() },
            { kind: "server", message: outcomeMsg() },
        ]);
        render(view, root, handlers);
        const first = root.innerHTML;
        render(view, root, handlers);
        expect(root.innerHTML).toBe(first);
    });
});
