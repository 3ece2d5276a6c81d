"""Tour of the objective catalog and its self-validation checks.

Every oracle ships with its smoothness constant, minimum value and explicit
minimizers, so the later energy computations never have to estimate
anything.  This script prints the catalog and evaluates the convexity and
cocoercivity slacks plus a finite-difference gradient audit at random
points.
"""

import numpy as np

from accellab import (
    built_in_catalog,
    check_cocoercivity,
    check_convexity_inequality,
    check_gradient_fd,
)

rng = np.random.default_rng(0)

print("catalog")
print("-------")
for entry in built_in_catalog():
    o = entry.oracle
    mins = ", ".join(str(np.round(z, 3)) for z in o.known_minimizers)
    print(f"{entry.id:16s} dim={o.dim} L={o.lipschitz:g} fstar={o.fstar:g} "
          f"argmin={o.argmin_kind:13s} minimizers: {mins}")
    print(f"{'':16s} {entry.notes}")

print()
print("inequality slacks over 200 random pairs (should never be negative)")
print("------------------------------------------------------------------")
for entry in built_in_catalog():
    o = entry.oracle
    conv = min(
        check_convexity_inequality(o, rng.uniform(-10, 10, o.dim), rng.uniform(-10, 10, o.dim))
        for _ in range(200)
    )
    coco = min(
        check_cocoercivity(o, rng.uniform(-10, 10, o.dim), rng.uniform(-10, 10, o.dim))
        for _ in range(200)
    )
    print(f"{entry.id:16s} min convexity slack {conv:+.3e}   min cocoercivity slack {coco:+.3e}")

print()
print("gradient vs central finite differences (h = 1e-5, seams avoided)")
print("----------------------------------------------------------------")
for entry in built_in_catalog():
    o = entry.oracle
    errs = []
    while len(errs) < 50:
        x = rng.uniform(-10, 10, o.dim)
        if entry.id in ("counterexample", "segment2d") and abs(abs(x[0]) - 1.0) < 1e-4:
            continue
        errs.append(check_gradient_fd(o, x, 1e-5))
    print(f"{entry.id:16s} max component error {max(errs):.3e}")
