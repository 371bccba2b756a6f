"""
The partial-online control loop
===============================

The closed loop that the companion UI drives: the operator clicks an intent
(short/long), a held-out trial of that class stands in for live signal
acquisition, the trained pipeline decodes it, and the state machine consumes
whatever was decoded, right or wrong. Running accuracy and live information
transfer rate update after every decision.
"""

import numpy as np

from isbci import dataio, sim

# Modest separation leaves the decoder imperfect on purpose: misses are the
# interesting case, because the state machine acts on the decoded class.
trialset = dataio.gen_synthetic(
    dataio.SyntheticConfig(n_per_class=80, c=8, s=128, K=2, separation=0.15, seed=21))

# 60% of the data trains the decoder; the rest becomes the per-class pools
# the loop samples from (without replacement, seeded order).
session = sim.start_session(trialset, "design1", split=0.6, seed=5, decoder="pipeline")
state = session.state_message()
print(f"session {state['session']}: rect={state['rect']}, prompts={state['prompts']}")

intents = ["short", "long", "short", "short", "long", "long", "short", "long"]
for intent in intents:
    outcome = session.submit_intent(intent)
    mark = "ok " if outcome["correct"] else "MISS"
    acts = ", ".join(a["action"] for a in outcome["actions"]) or "state change only"
    print(f"  intent {intent:<5} decoded {outcome['decoded']:<5} {mark} -> {acts}")

stats = session.session_stats()
print(f"\n{stats['decodes']} decisions, accuracy {stats['accuracy']:.2f}, "
      f"live ITR {stats['itr_bpm']:.1f} bits/min")

# The same loop is scriptable headlessly from the command line:
#   isbci simulate --data demo.isbc --design 1 --intents intents.txt --seed 5
# and served to the browser UI with:
#   isbci serve --data demo.isbc --port 8765 --web-root frontend/dist
