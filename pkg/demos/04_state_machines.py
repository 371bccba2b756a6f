"""
The two control-interface state machines
========================================

Design 1 halves a translucent rectangle until it covers the target, then
switches to commit a double click; design 2 converts decisions into
directory-tree key actions with an undo stack. Both respond to exactly two
decoded events: a short word (0) or a long word (1).
"""

from isbci import fsm

screen = fsm.Rect(0, 0, 1024, 768)

# --- design 1: crop / switch -------------------------------------------------
ctx = fsm.new_design1_context(screen, seed=0)
print(f"start: state={ctx.state.value}, rect={ctx.current.to_dict()}, "
      f"prompt={ctx.prompt}")

# Crop twice: keep the right half (long), then its top half (short). Each crop
# needs a crop-state selection first (short in the crop-or-switch state).
for ev in (fsm.FsmEvent.SHORT, fsm.FsmEvent.LONG, fsm.FsmEvent.SHORT, fsm.FsmEvent.SHORT):
    ctx, actions = fsm.d1_step(ctx, ev)
    for act in actions:
        print(f"  {act}")
print(f"after two crops: rect={ctx.current.to_dict()}")

# Switch and double-click the folder under the rectangle; the machine resets.
for ev in (fsm.FsmEvent.LONG, fsm.FsmEvent.SHORT):
    ctx, actions = fsm.d1_step(ctx, ev)
    for act in actions:
        print(f"  {act}")
print(f"after the click: rect back to {ctx.current.to_dict()}")

# How many crop decisions does a perfect decoder need to pin down one 64x48
# desktop cell? Every aligned cell takes exactly eight.
cell = fsm.Rect(64 * 5, 48 * 3, 64, 48)
print(f"crops to reach cell {cell.to_dict()}: {fsm.d1_steps_to_target(screen, cell)}")

# --- design 2: tree navigation ----------------------------------------------
ctx2 = fsm.new_design2_context(seed=0)
print(f"\ntree root children: {[c.name for c in ctx2.tree.children]}")

script = [
    ("enter the first folder", (fsm.FsmEvent.SHORT, fsm.FsmEvent.SHORT)),
    ("move right one sibling", (fsm.FsmEvent.SHORT, fsm.FsmEvent.LONG, fsm.FsmEvent.SHORT)),
    ("undo that move", (fsm.FsmEvent.LONG, fsm.FsmEvent.SHORT)),
    ("go one level up", (fsm.FsmEvent.LONG, fsm.FsmEvent.LONG)),
]
for label, events in script:
    emitted = []
    for ev in events:
        ctx2, actions = fsm.d2_step(ctx2, ev)
        emitted += actions
    here = fsm.node_at(ctx2.tree, ctx2.cursor).name
    print(f"{label}: {emitted} -> cursor at '{here}'")
