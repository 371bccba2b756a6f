// View state as a pure function of the event log.
//
// Every UI change flows through reduce(): server messages and the few local
// events (intent sent, network failure) produce a new ViewState. Replaying
// the same log therefore reproduces the same screen, which is what the
// replay tests assert. No statistics are computed here; accuracy and ITR
// come from server fields untouched.

import type {
    OutcomeMessage,
    RectShape,
    ServerMessage,
    StateMessage,
    StatsShape,
    TreeShape,
} from "./protocol.js";

export type UiEvent =
    | { kind: "server"; message: ServerMessage }
    | { kind: "intent_sent"; value: "short" | "long" }
    | { kind: "network_error"; detail: string }
    | { kind: "retry" }
    | { kind: "dismiss_error" };

export interface ViewState {
    session: string | null;
    design: "design1" | "design2" | null;
    fsmState: string | null;
    rect: RectShape | null;
    screen: RectShape | null;
    tree: TreeShape | null;
    prompts: { short: string; long: string } | null;
    stats: StatsShape | null;
    lastOutcome: OutcomeMessage | null;
    /** true while an intent is in flight; input stays locked */
    pending: boolean;
    /** last unacknowledged intent, offered again by the retry prompt */
    unacknowledged: "short" | "long" | null;
    error: string | null;
    log: string[];
}

export function initialViewState(): ViewState {
    return {
        session: null,
        design: null,
        fsmState: null,
        rect: null,
        screen: null,
        tree: null,
        prompts: null,
        stats: null,
        lastOutcome: null,
        pending: false,
        unacknowledged: null,
        error: null,
        log: [],
    };
}

function applyState(view: ViewState, message: StateMessage): ViewState {
    return {
        ...view,
        session: message.session,
        design: message.design,
        fsmState: message.fsm_state,
        rect: message.rect ?? null,
        screen: message.screen ?? (message.rect ? view.screen : null),
        tree: message.tree ?? null,
        prompts: message.prompts,
        error: null,
    };
}

function describeOutcome(message: OutcomeMessage): string {
    const acts = message.actions.map((a) => String(a.action ?? a.key ?? "?")).join(", ");
    const mark = message.correct ? "ok" : "MISS";
    return `intent ${message.intended} -> decoded ${message.decoded} [${mark}]`
        + (acts ? ` actions: ${acts}` : "");
}

export function reduce(view: ViewState, event: UiEvent): ViewState {
    switch (event.kind) {
        case "intent_sent":
            if (view.pending || view.session === null) {
                return view; // input is locked; the click is ignored
            }
            return { ...view, pending: true, unacknowledged: event.value };
        case "network_error":
            return {
                ...view,
                pending: false,
                error: `network failure: ${event.detail} - retry?`,
            };
        case "retry":
            if (view.unacknowledged === null) {
                return { ...view, error: null };
            }
            return { ...view, pending: true, error: null };
        case "dismiss_error":
            return { ...view, error: null };
        case "server":
            break;
    }
    const message = event.message;
    if (message.type === "error") {
        return { ...view, pending: false, error: message.error };
    }
    if (message.type === "state") {
        // screen arrives on design-1 state messages; remember the first one
        const next = applyState(view, message);
        if (message.screen) {
            next.screen = message.screen;
        }
        return next;
    }
    // outcome: unlock input, remember the decode, append to the log
    return {
        ...view,
        pending: false,
        unacknowledged: null,
        stats: message.stats,
        lastOutcome: message,
        log: [...view.log, describeOutcome(message)],
    };
}

export function replay(events: UiEvent[]): ViewState {
    return events.reduce(reduce, initialViewState());
}

/**
 * Halving used purely for display and click mapping: vertical when the
 * rectangle is at least as wide as tall (odd pixel to the first half),
 * horizontal otherwise. The first half is where the short word lives.
 */
export function splitForDisplay(rect: RectShape): {
    vertical: boolean;
    first: RectShape;
    second: RectShape;
} {
    if (rect.w >= rect.h) {
        const left = Math.floor((rect.w + 1) / 2);
        return {
            vertical: true,
            first: { x: rect.x, y: rect.y, w: left, h: rect.h },
            second: { x: rect.x + left, y: rect.y, w: rect.w - left, h: rect.h },
        };
    }
    const top = Math.floor((rect.h + 1) / 2);
    return {
        vertical: false,
        first: { x: rect.x, y: rect.y, w: rect.w, h: top },
        second: { x: rect.x, y: rect.y + top, w: rect.w, h: rect.h - top },
    };
}

/** Map a click inside the current rectangle to an intent value. */
export function intentForClick(rect: RectShape, px: number, py: number): "short" | "long" | null {
    if (px < rect.x || py < rect.y || px >= rect.x + rect.w || py >= rect.y + rect.h) {
        return null;
    }
    const { vertical, first } = splitForDisplay(rect);
    if (vertical) {
        return px < first.x + first.w ? "short" : "long";
    }
    return py < first.y + first.h ? "short" : "long";
}
