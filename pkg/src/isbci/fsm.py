"""The two computer-control state machines, as pure transition functions.

Design 1 alternates between halving a translucent screen rectangle and a
switch state that either commits a double click or restores the previous
rectangle. Design 2 walks a directory tree with Enter / arrow / level-up
key actions and an undo stack. Both consume binary decoded events (short
word = 0, long word = 1); transitions return a new context plus the list
of emitted actions (plain dicts, ready for transcripts and the wire).
"""

import enum
from dataclasses import dataclass, replace

import numpy as np

DEFAULT_SHORT_WORDS = ("in", "out", "up")
DEFAULT_LONG_WORDS = ("independent", "cooperate")


class FsmEvent(enum.Enum):
    SHORT = 0
    LONG = 1
    EPSILON = 2


class D1State(enum.Enum):
    CROP_OR_SWITCH = "crop_or_switch"
    CROP_RECTANGLE = "crop_rectangle"
    SWITCH = "switch"


class D2State(enum.Enum):
    A = "A"
    B = "B"
    C = "C"
    D = "D"


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.w < 1 or self.h < 1:
            raise ValueError("rect needs positive width and height")

    @property
    def area(self):
        return self.w * self.h

    @property
    def center(self):
        return (self.x + self.w // 2, self.y + self.h // 2)

    def contains(self, other: "Rect") -> bool:
        return (self.x <= other.x and self.y <= other.y
                and other.x + other.w <= self.x + self.w
                and other.y + other.h <= self.y + self.h)

    def overlap_area(self, other: "Rect") -> int:
        w = min(self.x + self.w, other.x + other.w) - max(self.x, other.x)
        h = min(self.y + self.h, other.y + other.h) - max(self.y, other.y)
        return max(w, 0) * max(h, 0)

    def to_dict(self):
        return {"x": self.x, "y": self.y, "w": self.w, "h": self.h}


def split_rect(r: Rect):
    """Halve a rectangle along its longer side; the odd pixel goes to ``first``.

    ``first`` is the left half for a vertical split (w >= h) and the top
    half otherwise; the two halves are disjoint and tile ``r``.
    """
    if r.w < 2 and r.h < 2:
        raise ValueError("cannot split")
    if r.w >= r.h:
        left = (r.w + 1) // 2
        return Rect(r.x, r.y, left, r.h), Rect(r.x + left, r.y, r.w - left, r.h)
    top = (r.h + 1) // 2
    return Rect(r.x, r.y, r.w, top), Rect(r.x, r.y + top, r.w, r.h - top)


def _draw_prompt(seed: int, step: int, short_words, long_words):
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(step)]))
    return (short_words[int(rng.integers(len(short_words)))],
            long_words[int(rng.integers(len(long_words)))])


@dataclass(frozen=True)
class Design1Context:
    state: D1State
    current: Rect
    previous: tuple
    screen: Rect
    prompt: tuple
    short_words: tuple = DEFAULT_SHORT_WORDS
    long_words: tuple = DEFAULT_LONG_WORDS
    seed: int = 0
    step: int = 0


def new_design1_context(screen: Rect, seed: int = 0,
                        short_words=DEFAULT_SHORT_WORDS,
                        long_words=DEFAULT_LONG_WORDS) -> Design1Context:
    return Design1Context(
        state=D1State.CROP_OR_SWITCH,
        current=screen,
        previous=(),
        screen=screen,
        prompt=_draw_prompt(seed, 0, tuple(short_words), tuple(long_words)),
        short_words=tuple(short_words),
        long_words=tuple(long_words),
        seed=seed,
    )


def _d1_advance(ctx: Design1Context, **changes) -> Design1Context:
    step = ctx.step + 1
    prompt = _draw_prompt(ctx.seed, step, ctx.short_words, ctx.long_words)
    return replace(ctx, step=step, prompt=prompt, **changes)


def d1_step(ctx: Design1Context, ev: FsmEvent):
    """One transition of the crop/switch machine; returns (ctx', actions).

    Short in the crop state keeps the first (left/top) half, where the
    short word is displayed; long keeps the second half. Short in the
    switch state double-clicks the center of the current rectangle and
    resets; long restores the rectangle from before the last crop.
    """
    if ev == FsmEvent.EPSILON:
        raise ValueError("design 1 has no epsilon transitions")
    if ctx.state == D1State.CROP_OR_SWITCH:
        next_state = D1State.CROP_RECTANGLE if ev == FsmEvent.SHORT else D1State.SWITCH
        return _d1_advance(ctx, state=next_state), []
    if ctx.state == D1State.CROP_RECTANGLE:
        first, second = split_rect(ctx.current)
        kept = first if ev == FsmEvent.SHORT else second
        ctx2 = _d1_advance(
            ctx,
            state=D1State.CROP_OR_SWITCH,
            current=kept,
            previous=ctx.previous + (ctx.current,),
        )
        return ctx2, [{"action": "crop_applied", "rect": kept.to_dict()}]
    # switch state
    if ev == FsmEvent.SHORT:
        cx, cy = ctx.current.center
        ctx2 = _d1_advance(
            ctx, state=D1State.CROP_OR_SWITCH, current=ctx.screen, previous=()
        )
        return ctx2, [{"action": "double_click", "x": cx, "y": cy}]
    if ctx.previous:
        restored, remaining = ctx.previous[-1], ctx.previous[:-1]
    else:
        restored, remaining = ctx.screen, ()
    ctx2 = _d1_advance(
        ctx, state=D1State.CROP_RECTANGLE, current=restored, previous=remaining
    )
    return ctx2, [{"action": "rect_restored", "rect": restored.to_dict()}]


@dataclass(frozen=True)
class TreeNode:
    name: str
    children: tuple = ()

    def to_dict(self):
        return {"name": self.name, "children": [c.to_dict() for c in self.children]}


def node_at(root: TreeNode, path) -> TreeNode:
    node = root
    for i in path:
        node = node.children[i]
    return node


def default_tree() -> TreeNode:
    """Small virtual directory tree for simulations and demos."""
    return TreeNode("desktop", (
        TreeNode("documents", (
            TreeNode("reports", (TreeNode("q1.txt"), TreeNode("q2.txt"))),
            TreeNode("notes.txt"),
        )),
        TreeNode("downloads", (TreeNode("music"), TreeNode("setup.bin"))),
        TreeNode("pictures", (TreeNode("trip"), TreeNode("icons"))),
        TreeNode("projects", (
            TreeNode("decoder", (TreeNode("src"), TreeNode("data"))),
            TreeNode("website"),
        )),
        TreeNode("music"),
        TreeNode("videos"),
        TreeNode("trash"),
    ))


_INVERSE_KEY = {
    "Enter": "LevelUp",
    "LevelUp": "Enter",
    "RightArrow": "LeftArrow",
    "DownArrow": "UpArrow",
}


@dataclass(frozen=True)
class Design2Context:
    state: D2State
    cursor: tuple
    history: tuple  # entries (key, cursor_before)
    tree: TreeNode
    grid_cols: int = 4
    prompt: tuple = ()
    short_words: tuple = DEFAULT_SHORT_WORDS
    long_words: tuple = DEFAULT_LONG_WORDS
    seed: int = 0
    step: int = 0


def new_design2_context(tree: TreeNode | None = None, seed: int = 0, grid_cols: int = 4,
                        short_words=DEFAULT_SHORT_WORDS,
                        long_words=DEFAULT_LONG_WORDS) -> Design2Context:
    tree = tree if tree is not None else default_tree()
    cursor = (0,) if tree.children else ()
    return Design2Context(
        state=D2State.A,
        cursor=cursor,
        history=(),
        tree=tree,
        grid_cols=grid_cols,
        prompt=_draw_prompt(seed, 0, tuple(short_words), tuple(long_words)),
        short_words=tuple(short_words),
        long_words=tuple(long_words),
        seed=seed,
    )


def _d2_advance(ctx: Design2Context, **changes) -> Design2Context:
    step = ctx.step + 1
    prompt = _draw_prompt(ctx.seed, step, ctx.short_words, ctx.long_words)
    return replace(ctx, step=step, prompt=prompt, **changes)


def _key(name):
    return {"action": "key", "key": name}


def _sibling_count(ctx: Design2Context) -> int:
    return len(node_at(ctx.tree, ctx.cursor[:-1]).children) if ctx.cursor else 0


def d2_step(ctx: Design2Context, ev: FsmEvent):
    """One transition of the tree-navigation machine; returns (ctx', actions).

    States C and D perform their key action and fall back to A without
    further input (the epsilon edge), so callers only ever submit word
    events. Moves off the edge of the sibling grid emit ``blocked_edge``
    and leave the cursor alone; undo with no history emits
    ``undo_unavailable``.
    """
    if ev == FsmEvent.EPSILON:
        raise ValueError("epsilon transitions are applied internally")
    if ctx.state == D2State.A:
        target = D2State.B if ev == FsmEvent.SHORT else D2State.D
        return _d2_advance(ctx, state=target), []

    if ctx.state == D2State.B:
        if ev == FsmEvent.LONG:
            return _d2_advance(ctx, state=D2State.C), []
        node = node_at(ctx.tree, ctx.cursor)
        if not node.children:
            return _d2_advance(ctx, state=D2State.A), [{"action": "blocked_edge"}]
        ctx2 = _d2_advance(
            ctx,
            state=D2State.A,
            cursor=ctx.cursor + (0,),
            history=ctx.history + (("Enter", ctx.cursor),),
        )
        return ctx2, [_key("Enter")]

    if ctx.state == D2State.C:
        key = "RightArrow" if ev == FsmEvent.SHORT else "DownArrow"
        delta = 1 if ev == FsmEvent.SHORT else ctx.grid_cols
        if not ctx.cursor:
            return _d2_advance(ctx, state=D2State.A), [{"action": "blocked_edge"}]
        new_index = ctx.cursor[-1] + delta
        if new_index >= _sibling_count(ctx):
            return _d2_advance(ctx, state=D2State.A), [{"action": "blocked_edge"}]
        ctx2 = _d2_advance(
            ctx,
            state=D2State.A,
            cursor=ctx.cursor[:-1] + (new_index,),
            history=ctx.history + ((key, ctx.cursor),),
        )
        return ctx2, [_key(key)]

    # state D: undo (short) or go one level up (long)
    if ev == FsmEvent.SHORT:
        if not ctx.history:
            return _d2_advance(ctx, state=D2State.A), [{"action": "undo_unavailable"}]
        key, cursor_before = ctx.history[-1]
        ctx2 = _d2_advance(
            ctx, state=D2State.A, cursor=cursor_before, history=ctx.history[:-1]
        )
        return ctx2, [_key(_INVERSE_KEY[key])]
    if len(ctx.cursor) <= 1:
        return _d2_advance(ctx, state=D2State.A), [{"action": "blocked_edge"}]
    ctx2 = _d2_advance(
        ctx,
        state=D2State.A,
        cursor=ctx.cursor[:-1],
        history=ctx.history + (("LevelUp", ctx.cursor),),
    )
    return ctx2, [_key("LevelUp")]


def d1_steps_to_target(screen: Rect, target: Rect, seed: int = 0) -> int:
    """Crop decisions a perfect decoder needs until the rectangle fits the target.

    Drives :func:`d1_step` greedily (largest overlap with the target wins)
    and counts only the crop decisions, not the crop-or-switch selections.
    """
    if not screen.contains(target):
        raise ValueError("target must lie inside the screen")
    ctx = new_design1_context(screen, seed)
    crops = 0
    while not target.contains(ctx.current):
        ctx, _ = d1_step(ctx, FsmEvent.SHORT)  # choose the crop state
        first, second = split_rect(ctx.current)
        ev = FsmEvent.SHORT if first.overlap_area(target) >= second.overlap_area(target) \
            else FsmEvent.LONG
        ctx, _ = d1_step(ctx, ev)
        crops += 1
    return crops
