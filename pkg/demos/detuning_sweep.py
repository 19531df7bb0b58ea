"""
How much does the intermediate detuning cost?
=============================================

Scan the quasi-single-photon detuning delta for the four dissipative
shortcuts and compare the phonon number at the end of the pulse.
"""

import numpy as np

from stacool.harness import FAMILIES, default_deltas, standard_scenario, sweep_detuning

deltas = default_deltas(-0.2, 0.2, 9)
configs = [standard_scenario(f, "sta", dissipative=True) for f in FAMILIES]
sweep = sweep_detuning(configs, deltas)

print("delta   " + "  ".join(f"{label:>14}" for label in sweep.labels))
for i, d in enumerate(sweep.deltas):
    print(f"{d:+.3f}  " + "  ".join(f"{sweep.pb_final[k][i]:14.3f}" for k in sweep.labels))

best = {k: float(deltas[np.argmin(v)]) for k, v in sweep.pb_final.items()}
print("optimal delta per protocol:", best)
