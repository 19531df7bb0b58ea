"""
Which laser pulses produce the couplings?
=========================================

The effective couplings are ``G_i = g_i alpha_i`` with ``alpha_i`` the
driven cavity amplitudes. Inverting the displacement equations gives the
drive amplitudes ``Omega_i(t)``; integrating forward with those drives must
give the couplings back.
"""

import numpy as np

from stacool.drives import round_trip_error, self_consistency
from stacool.harness import standard_scenario, reconstruct

cfg = standard_scenario("vitanov", "sta", dissipative=True)
pair = reconstruct(cfg)

for name, om in (("Omega1", pair.Omega1), ("Omega2", pair.Omega2)):
    k = np.argmax(np.abs(om))
    print(f"{name}: peak |Omega| = {abs(om[k]):.1f} omega_m at t = {pair.t[k]:.1f}")

# Forward check: drive -> displacement -> coupling.
err = round_trip_error(cfg.schedule(), cfg.system)
print("round-trip relative error:", {k: f"{v:.1e}" for k, v in err.items()})

# The linearization needs the mechanical frequency pull to stay small.
print(f"max 2 g |Re beta| / Delta = {self_consistency(cfg.schedule(), cfg.system):.3f}")
