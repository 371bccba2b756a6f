// Wire protocol types and transport for the control-loop server.
//
// The server speaks JSON messages over a WebSocket at /ws (one message per
// text frame) or over POST /api (response body = array of messages).

export interface RectShape {
    x: number;
    y: number;
    w: number;
    h: number;
}

export interface TreeNodeShape {
    name: string;
    children: TreeNodeShape[];
}

export interface TreeShape {
    nodes: TreeNodeShape;
    cursor: number[];
}

export interface StatsShape {
    decodes: number;
    correct: number;
    accuracy: number;
    itr_bpm: number;
    [extra: string]: unknown;
}

export interface StateMessage {
    type: "state";
    session: string;
    design: "design1" | "design2";
    fsm_state: string;
    prompts: { short: string; long: string };
    rect?: RectShape;
    screen?: RectShape;
    tree?: TreeShape;
    [extra: string]: unknown;
}

export interface OutcomeMessage {
    type: "outcome";
    session: string;
    intended: "short" | "long";
    decoded: "short" | "long";
    correct: boolean;
    actions: Array<Record<string, unknown>>;
    stats: StatsShape;
    [extra: string]: unknown;
}

export interface ErrorMessage {
    type: "error";
    error: string;
}

export type ServerMessage = StateMessage | OutcomeMessage | ErrorMessage;

export interface StartRequest {
    type: "start";
    design: "design1" | "design2";
    seed: number;
}

export interface IntentRequest {
    type: "intent";
    session: string;
    value: "short" | "long";
}

export type ClientMessage = StartRequest | IntentRequest;

export function parseServerMessage(raw: string): ServerMessage {
    let parsed: unknown;
    try {
        parsed = JSON.parse(raw);
    } catch {
        throw new Error(`malformed message: ${raw.slice(0, 80)}`);
    }
    if (typeof parsed !== "object" || parsed === null || !("type" in parsed)) {
        throw new Error("malformed message: missing type");
    }
    const kind = (parsed as { type: unknown }).type;
    if (kind !== "state" && kind !== "outcome" && kind !== "error") {
        throw new Error(`malformed message: unknown type ${String(kind)}`);
    }
    return parsed as ServerMessage;
}

export interface Transport {
    send(message: ClientMessage): void;
    close(): void;
}

export interface TransportCallbacks {
    onMessage(message: ServerMessage): void;
    onNetworkError(detail: string): void;
}

/** WebSocket transport: the primary path for live sessions. */
export function connectWebSocket(
    baseUrl: string,
    callbacks: TransportCallbacks,
): Promise<Transport> {
    const url = baseUrl.replace(/^http/, "ws").replace(/\/$/, "") + "/ws";
    return new Promise((resolve, reject) => {
        const ws = new WebSocket(url);
        ws.onopen = () => resolve({
            send: (message) => ws.send(JSON.stringify(message)),
            close: () => ws.close(),
        });
        ws.onerror = () => {
            callbacks.onNetworkError("websocket error");
            reject(new Error("websocket connection failed"));
        };
        ws.onmessage = (event) => {
            try {
                callbacks.onMessage(parseServerMessage(String(event.data)));
            } catch (err) {
                callbacks.onMessage({ type: "error", error: String(err) });
            }
        };
    });
}

/** HTTP request/response fallback: each send POSTs and dispatches the reply array. */
export function connectHttp(baseUrl: string, callbacks: TransportCallbacks): Transport {
    const url = baseUrl.replace(/\/$/, "") + "/api";
    return {
        send: (message) => {
            fetch(url, {
                method: "POST",
                headers: { "Content-Type": "application/json" },
                body: JSON.stringify(message),
            })
                .then(async (resp) => {
                    const replies = (await resp.json()) as ServerMessage[];
                    for (const reply of replies) {
                        callbacks.onMessage(reply);
                    }
                })
                .catch((err) => callbacks.onNetworkError(String(err)));
        },
        close: () => undefined,
    };
}
