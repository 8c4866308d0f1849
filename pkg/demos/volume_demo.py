"""Small-ball volumes on the Grassmannian: closed form vs simulation.

Sweeps the ball radius for a few (n, p, q, beta) tuples and prints the
Monte-Carlo volume next to the closed-form leading term, the two-sided
bounds, and (for p = q) the Barg-Nogin large-n baseline.  The leading
term tracks the simulation closely for radius <= 1, while the baseline
can be off by an order of magnitude at moderate n.
"""

import grassquant as gq
from grassquant import BallSpec

SAMPLES = 100_000
TUPLES = [
    (4, 1, 1, 2),   # lines in C^4: the volume is exactly delta^6
    (5, 2, 2, 2),   # complex q = p: exact again
    (5, 1, 2, 1),   # real q = p + 1: exact, equals delta^3
    (4, 2, 2, 1),   # real p = q: only bounded, not exact
    (6, 2, 3, 2),   # genuinely unequal dimensions
]
DELTAS = [0.2, 0.4, 0.6, 0.8, 1.0]

for i, (n, p, q, beta) in enumerate(TUPLES):
    print(f"\nballs in G_{{{n},{p}}} about centers in G_{{{n},{q}}}, beta={beta}")
    print(f"{'delta':>6} {'monte carlo':>14} {'closed form':>12} {'lower':>10} {'upper':>10} {'barg-nogin':>11}")
    grid = gq.ball_volume_mc_grid(n, p, q, beta, DELTAS, SAMPLES, gq.derive_rng(2024, i))
    for delta, mc in zip(DELTAS, grid):
        spec = BallSpec(n, p, q, beta, delta)
        cf = gq.ball_volume_approx(spec).value
        lo, hi = gq.ball_volume_bounds(spec)
        bn = gq.barg_nogin_approx(n, p, beta, delta).value if p == q else float("nan")
        print(
            f"{delta:>6.2f} {mc.value:>10.6f} ({mc.stderr:.0e}) {cf:>12.6f}"
            f" {lo.value:>10.6f} {hi.value:>10.6f} {bn:>11.3e}"
        )

print(
    "\nThe exact cases (complex q = p; real q = p + 1) match the simulation to"
    "\nMonte-Carlo noise at every radius; the others stay inside [lower, upper]."
)
