// DOM rendering of a ViewState. Full redraw per event keeps the screen a
// pure function of the state; handlers route clicks back to the app.

import type { RectShape, TreeNodeShape } from "./protocol.js";
import { splitForDisplay, type ViewState } from "./state.js";

export interface Handlers {
    onIntent(value: "short" | "long"): void;
    onRetry(): void;
    onDismiss(): void;
}

const SCALE = 0.5; // 1024x768 virtual desktop drawn at 512x384 css pixels
export const GRID_COLS = 16;
export const GRID_ROWS = 12;

function el(tag: string, className?: string, text?: string): HTMLElement {
    const node = document.createElement(tag);
    if (className) {
        node.className = className;
    }
    if (text !== undefined) {
        node.textContent = text;
    }
    return node;
}

function px(value: number): string {
    return `${Math.round(value * SCALE)}px`;
}

function place(node: HTMLElement, rect: RectShape): void {
    node.style.left = px(rect.x);
    node.style.top = px(rect.y);
    node.style.width = px(rect.w);
    node.style.height = px(rect.h);
}

// -- design 1: folder grid + translucent rectangle ---------------------------

function renderDesktop(view: ViewState, handlers: Handlers): HTMLElement {
    const screen = view.screen ?? { x: 0, y: 0, w: 1024, h: 768 };
    const desktop = el("div", "desktop");
    desktop.dataset.testid = "desktop";
    desktop.style.width = px(screen.w);
    desktop.style.height = px(screen.h);

    const cellW = screen.w / GRID_COLS;
    const cellH = screen.h / GRID_ROWS;
    for (let row = 0; row < GRID_ROWS; row++) {
        for (let col = 0; col < GRID_COLS; col++) {
            const icon = el("div", "folder-icon");
            place(icon, { x: col * cellW + 8, y: row * cellH + 8, w: cellW - 16, h: cellH - 16 });
            desktop.appendChild(icon);
        }
    }

    if (view.rect) {
        const overlay = el("div", "crop-rect");
        overlay.dataset.testid = "crop-rect";
        place(overlay, view.rect);
        if (view.fsmState === "crop_rectangle" && view.prompts) {
            const { vertical, first, second } = splitForDisplay(view.rect);
            overlay.classList.add(vertical ? "split-vertical" : "split-horizontal");
            const firstHalf = el("div", "half first-half");
            const secondHalf = el("div", "half second-half");
            firstHalf.dataset.testid = "half-short";
            secondHalf.dataset.testid = "half-long";
            place(firstHalf, { ...first, x: first.x - view.rect.x, y: first.y - view.rect.y });
            place(secondHalf, { ...second, x: second.x - view.rect.x, y: second.y - view.rect.y });
            firstHalf.appendChild(wordCard(view, "short"));
            secondHalf.appendChild(wordCard(view, "long"));
            firstHalf.onclick = () => handlers.onIntent("short");
            secondHalf.onclick = () => handlers.onIntent("long");
            overlay.appendChild(firstHalf);
            overlay.appendChild(secondHalf);
        }
        desktop.appendChild(overlay);
    }
    return desktop;
}

function wordCard(view: ViewState, value: "short" | "long", caption?: string): HTMLElement {
    const word = value === "short" ? view.prompts?.short : view.prompts?.long;
    const card = el("div", `word-card ${value}-card`);
    card.dataset.testid = `card-${value}`;
    card.appendChild(el("div", "card-word", word ?? ""));
    if (caption) {
        card.appendChild(el("div", "card-caption", caption));
    }
    return card;
}

// -- design 2: directory tree -------------------------------------------------

function renderTree(node: TreeNodeShape, path: number[], cursor: number[]): HTMLElement {
    const item = el("li");
    const here = path.length === cursor.length && path.every((v, i) => v === cursor[i]);
    const label = el("span", here ? "tree-node cursor" : "tree-node", node.name);
    if (here) {
        label.dataset.testid = "tree-cursor";
    }
    item.appendChild(label);
    if (node.children.length > 0) {
        const list = el("ul");
        node.children.forEach((child, index) => {
            list.appendChild(renderTree(child, [...path, index], cursor));
        });
        item.appendChild(list);
    }
    return item;
}

// -- choice cards per machine state -------------------------------------------

const D1_CAPTIONS: Record<string, [string, string]> = {
    crop_or_switch: ["crop the rectangle", "switch window"],
    crop_rectangle: ["keep left / top half", "keep right / bottom half"],
    switch: ["double-click here", "restore last rectangle"],
};

const D2_CAPTIONS: Record<string, [string, string]> = {
    A: ["navigate", "correct / go up"],
    B: ["enter folder", "move within level"],
    C: ["move right", "move down"],
    D: ["undo last action", "one level up"],
};

function renderCards(view: ViewState, handlers: Handlers): HTMLElement {
    const box = el("div", "cards");
    box.dataset.testid = "cards";
    const captions = (view.design === "design1" ? D1_CAPTIONS : D2_CAPTIONS)[view.fsmState ?? ""];
    const shortCard = wordCard(view, "short", captions?.[0]);
    const longCard = wordCard(view, "long", captions?.[1]);
    shortCard.onclick = () => handlers.onIntent("short");
    longCard.onclick = () => handlers.onIntent("long");
    box.appendChild(shortCard); // short card always first: left / top
    box.appendChild(longCard);
    return box;
}

// -- panels --------------------------------------------------------------------

function renderStats(view: ViewState): HTMLElement {
    const panel = el("div", "stats");
    panel.dataset.testid = "stats";
    const stats = view.stats;
    const rows: Array<[string, string]> = stats
        ? [
            ["decisions", String(stats.decodes)],
            ["correct", String(stats.correct)],
            ["accuracy", `${(stats.accuracy * 100).toFixed(1)}%`],
            ["live ITR", `${stats.itr_bpm.toFixed(1)} bits/min`],
        ]
        : [["decisions", "0"]];
    for (const [label, value] of rows) {
        const row = el("div", "stat-row");
        row.appendChild(el("span", "stat-label", label));
        row.appendChild(el("span", "stat-value", value));
        panel.appendChild(row);
    }
    return panel;
}

function renderMismatch(view: ViewState): HTMLElement | null {
    const outcome = view.lastOutcome;
    if (!outcome || outcome.correct) {
        return null;
    }
    const note = el("div", "mismatch");
    note.dataset.testid = "mismatch";
    note.appendChild(el("strong", undefined,
        `decoded "${outcome.decoded}" but you meant "${outcome.intended}"`));
    const hint = view.design === "design1"
        ? "recover via the switch state: think the long word to restore the last rectangle"
        : "recover via the correction menu: long word, then short to undo";
    note.appendChild(el("div", "mismatch-hint", hint));
    return note;
}

// -- top-level render -----------------------------------------------------------

export function render(view: ViewState, root: HTMLElement, handlers: Handlers): void {
    root.textContent = "";
    const guarded: Handlers = {
        onIntent: (value) => {
            if (!view.pending && view.session !== null) {
                handlers.onIntent(value);
            }
        },
        onRetry: handlers.onRetry,
        onDismiss: handlers.onDismiss,
    };

    if (view.error !== null) {
        const banner = el("div", "banner");
        banner.dataset.testid = "banner";
        banner.appendChild(el("span", undefined, view.error));
        if (view.unacknowledged !== null) {
            const retry = el("button", "retry", "retry");
            retry.dataset.testid = "retry";
            (retry as HTMLButtonElement).onclick = () => handlers.onRetry();
            banner.appendChild(retry);
        }
        const dismiss = el("button", "dismiss", "dismiss");
        (dismiss as HTMLButtonElement).onclick = () => handlers.onDismiss();
        banner.appendChild(dismiss);
        root.appendChild(banner);
    }

    if (view.session === null) {
        root.appendChild(el("div", "idle", "no session - pick a design and press start"));
        return;
    }

    const main = el("div", view.pending ? "main locked" : "main");
    main.dataset.testid = "main";
    if (view.design === "design1") {
        main.appendChild(renderDesktop(view, guarded));
    } else if (view.tree) {
        const wrap = el("div", "tree-wrap");
        const badge = el("span", "state-badge", view.fsmState ?? "?");
        badge.dataset.testid = "state-badge";
        wrap.appendChild(badge);
        const list = el("ul", "tree-root");
        list.appendChild(renderTree(view.tree.nodes, [], view.tree.cursor));
        wrap.appendChild(list);
        main.appendChild(wrap);
    }

    const side = el("div", "side");
    side.appendChild(renderCards(view, guarded));
    side.appendChild(renderStats(view));
    const mismatch = renderMismatch(view);
    if (mismatch) {
        side.appendChild(mismatch);
    }
    const log = el("ol", "log");
    log.dataset.testid = "log";
    for (const line of view.log) {
        log.appendChild(el("li", undefined, line));
    }
    side.appendChild(log);
    main.appendChild(side);
    root.appendChild(main);
}
