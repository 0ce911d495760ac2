"""The kernel G(t,s) = -min(t,s) and its weighted suprema.

G converts the second-order problem with u(0) = A, u'(inf) = B into an
integral equation.  Two derived quantities drive all the operator bounds:
Q(s) = sup_t |G(t,s)|/(1+t) = s/(1+s), and the boundary weight
sup_t (|A|+|B|t)/(1+t) = max(|A|,|B|).  This script checks both closed
forms against brute-force scans and shows the kernel's single kink.
"""

import numpy as np

from impulsebvp import boundary_weight_sup, green, kernel_weight_sup

print("kernel values:")
for t, s in ((1.0, 2.0), (3.0, 1.0), (2.0, 2.0), (0.0, 5.0)):
    print(f"  G({t}, {s}) = {green(t, s):+.1f}")

print("\nsymmetry and the kink at t = s (s = 2):")
ts = np.array([1.0, 1.9, 1.99, 2.0, 2.01, 2.1, 3.0])
print("  t      :", "  ".join(f"{t:5.2f}" for t in ts))
print("  G(t, 2):", "  ".join(f"{green(t, 2.0):5.2f}" for t in ts))

print("\nQ(s) = s/(1+s) vs a 100001-point scan of min(t,s)/(1+t):")
tgrid = np.linspace(0.0, 100.0, 100001)
for s in (0.5, 1.0, 4.0, 25.0):
    brute = np.max(np.minimum(tgrid, s) / (1.0 + tgrid))
    print(f"  s={s:5.1f}: closed {kernel_weight_sup(s):.8f}  scan {brute:.8f}")

print("\nboundary weight max(|A|,|B|) vs scan of (|A|+|B|t)/(1+t):")
for a, b in ((2.0, 0.0), (0.0, 1.0), (-1.5, 3.0)):
    brute = np.max((abs(a) + abs(b) * tgrid) / (1.0 + tgrid))
    print(f"  A={a:+.1f} B={b:+.1f}: closed {boundary_weight_sup(a, b):.6f}  "
          f"scan {brute:.6f}")

print("\nintegral identity: int_0^inf G(t,s) e^-s ds = -(1 - e^-t)")
from numpy.polynomial.legendre import leggauss
xg, wg = leggauss(16)
edges = np.linspace(0.0, 60.0, 301)
for t in (0.5, 2.0, 10.0):
    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        sq = mid + half * xg
        total += float(np.sum(half * wg * green(t, sq) * np.exp(-sq)))
    print(f"  t={t:5.2f}: quadrature {total:+.10f}  closed {-(1-np.exp(-t)):+.10f}")
