// Application wiring: transport in, events through the reducer, render out.

import { connectHttp, connectWebSocket, type ServerMessage, type Transport } from "./protocol.js";
import { render } from "./render.js";
import { initialViewState, reduce, type UiEvent, type ViewState } from "./state.js";

class App {
    private view: ViewState = initialViewState();
    private transport: Transport | null = null;
    private root: HTMLElement;

    constructor(root: HTMLElement) {
        this.root = root;
        this.draw();
    }

    private dispatch(event: UiEvent): void {
        this.view = reduce(this.view, event);
        this.draw();
    }

    private draw(): void {
        render(this.view, this.root, {
            onIntent: (value) => this.sendIntent(value),
            onRetry: () => this.retry(),
            onDismiss: () => this.dispatch({ kind: "dismiss_error" }),
        });
    }

    async start(design: "design1" | "design2", seed: number, useWebSocket: boolean): Promise<void> {
        this.transport?.close();
        this.view = initialViewState();
        const callbacks = {
            onMessage: (message: ServerMessage) => this.dispatch({ kind: "server", message }),
            onNetworkError: (detail: string) => this.dispatch({ kind: "network_error", detail }),
        };
        try {
            this.transport = useWebSocket
                ? await connectWebSocket(window.location.origin, callbacks)
                : connectHttp(window.location.origin, callbacks);
        } catch {
            this.transport = connectHttp(window.location.origin, callbacks);
        }
        this.transport.send({ type: "start", design, seed });
        this.draw();
    }

    private sendIntent(value: "short" | "long"): void {
        if (this.view.pending || this.view.session === null || this.transport === null) {
            return;
        }
        this.dispatch({ kind: "intent_sent", value });
        this.transport.send({ type: "intent", session: this.view.session, value });
    }

    private retry(): void {
        const value = this.view.unacknowledged;
        if (value === null || this.view.session === null || this.transport === null) {
            this.dispatch({ kind: "dismiss_error" });
            return;
        }
        this.dispatch({ kind: "retry" });
        this.transport.send({ type: "intent", session: this.view.session, value });
    }
}

function boot(): void {
    const root = document.getElementById("view");
    const form = document.getElementById("controls");
    if (!root || !form) {
        return;
    }
    const app = new App(root);
    form.addEventListener("submit", (event) => {
        event.preventDefault();
        const design = (document.getElementById("design") as HTMLSelectElement).value;
        const seed = Number((document.getElementById("seed") as HTMLInputElement).value) || 0;
        const ws = (document.getElementById("use-ws") as HTMLInputElement).checked;
        void app.start(design === "2" ? "design2" : "design1", seed, ws);
    });
}

boot();
