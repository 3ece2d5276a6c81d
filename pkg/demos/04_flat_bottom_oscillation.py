"""The low-damping divergence study on the flat-bottomed objective.

With damping exponent r <= 1 the trajectory started at X(t0) = 2 keeps
sliding across the flat valley [-1, 1] and re-entering the quadratic walls:
it hits the endpoints forever and never settles.  The run below prints the
located |x| = 1 crossing events, checks that every excursion outside the
valley lasts at most pi, that each traversal of the valley takes at least
2/|entry velocity|, and that the oscillator energy only decays.
"""

import math

import numpy as np

from accellab import make_counterexample_1d, oscillator_energy, run_counterexample, sturm_excursion_check
from accellab.ode import excursion_intervals

traj = run_counterexample(r=1.0, t0=1.0, horizon=200.0)
print(f"r = 1, horizon 200: {traj.step_stats.accepted} accepted steps, "
      f"{len(traj.events)} endpoint crossings\n")

print("  #   t              x    velocity      kind")
for i, ev in enumerate(traj.events):
    x = 1 if "right" in ev.kind else -1
    print(f"{i + 1:3d}   {ev.t:12.6f} {x:+3d}  {ev.velocity:+.6f}   {ev.kind}")

print()
durations = [(b - a) for a, b in excursion_intervals(traj)]
print(f"excursions outside [-1, 1]: {len(durations)}, longest {max(durations):.6f} "
      f"(Sturm ceiling pi = {math.pi:.6f})")
print("sturm check:", sturm_excursion_check(traj, 1.0).notes)

enters = [ev for ev in traj.events if ev.kind.startswith("enter")]
exits = [ev for ev in traj.events if ev.kind.startswith("exit")]
print("\nflat-valley traversals (entry -> exit):")
for en, ex in zip(enters, exits):
    lower = 2.0 / abs(en.velocity)
    print(f"  t = {en.t:10.4f} -> {ex.t:10.4f}: took {ex.t - en.t:9.4f}, "
          f"lower bound 2/|v| = {lower:9.4f}")

osc = oscillator_energy(traj, make_counterexample_1d())
print(f"\noscillator energy: {osc[0]:.6f} -> {osc[-1]:.6f}, "
      f"largest increase {float(np.max(np.diff(osc))):+.2e} (must be ~0)")
print("the crossing count grows without bound as the horizon grows; "
      "the trajectory has no limit")
