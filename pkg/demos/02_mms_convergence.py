"""Manufactured-solution convergence of both solvers.

dx halves per level (n -> 2n - 1); both solvers should land on slope 2.
The relaxed run is done at eps = 0 where the scheme is second order
throughout; with eps > 0 the upwinded transport term would eventually pull
the slope toward 1 on fine grids.
"""

import os

from relaxns import FluidParams
from relaxns.experiments import mms_convergence
from relaxns.plots import plot_convergence

out = os.path.join(os.path.dirname(__file__), "out", "mms")
os.makedirs(out, exist_ok=True)

for solver, params in (
    ("relaxed", FluidParams(tau=0.1)),
    ("parabolic", FluidParams(tau=0.0)),
):
    res = mms_convergence(solver, params, base_n=33, levels=4, t_end=0.5)
    print(f"--- {solver}")
    for row in res.rows:
        print(f"  n = {row['n']:4d}  dx = {row['dx']:.5f}  err = {row['err_total']:.6e}")
    print(f"  fitted order {res.order:.4f}  ({res.verdict})")
    plot_convergence(res.rows, os.path.join(out, f"convergence_{solver}.svg"),
                     order=res.order)

print(f"wrote {out}/")
