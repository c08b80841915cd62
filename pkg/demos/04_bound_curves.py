# Closed-form curves: the f(eps) trade-off, the constant uncertainty floor and
# the continuity bound.  Output is plain CSV on stdout; plot it however you like.

import csv
import sys

import numpy as np

from envcap.capacity import continuity_bound, curve, epsilon0, uncertainty_bound

d = 3
eps0 = epsilon0(d)
print(f"# d={d}: eps0 = {eps0:.6e}, uncertainty floor = {uncertainty_bound(d):.6e}")
print(f"# continuity bound at eps=0.1, |B|=d: {continuity_bound(0.1, d):.6f}")

grid = np.linspace(0, 1.5 * eps0, 16)
out = csv.writer(sys.stdout, lineterminator="\n")
out.writerow(["epsilon", "max(f,0)", "floor"])
for (x, f), (_, floor) in zip(curve("tightrelation", grid, d), curve("uncertainty1", grid, d)):
    out.writerow([f"{x:.6e}", f"{f:.6f}", f"{floor:.6e}"])
