"""Piecewise-C1 functions on a truncated half-line mesh with registered jumps.

A function lives on [t0, horizon] as per-slot (value, derivative) data with
cubic Hermite interpolation inside each smooth piece, plus an affine
extension of slope ``tail_slope`` beyond the horizon.  Impulse times appear
as doubled nodes (a left-limit slot followed by a right-limit slot), so
discontinuities in value and derivative are first class and interpolation
never crosses them.  Evaluation at an impulse time returns the left slot
(left-continuity convention).

The weighted norms are the computational stand-ins for the function-space
norms: ``norm_weighted_sup`` is sup |x(t)|/(1+t), ``norm_deriv_sup`` is
sup |x'(t)|, both taken over node slots and combined with the limit terms
induced by the affine tail.  All objects are immutable; operations return
new instances.
"""

import csv
import math
from dataclasses import dataclass, replace

import numpy as np

__all__ = [
    "Mesh",
    "PiecewiseC1Function",
    "SolutionPair",
    "build_mesh",
    "norm_weighted_sup",
    "norm_deriv_sup",
    "norm_X",
    "apply_jump",
    "fn_lincomb",
    "pair_lincomb",
    "difference_norm",
    "write_csv",
]


@dataclass(frozen=True, eq=False)
class Mesh:
    """Node slots on [t0, horizon] with doubled slots at impulse times.

    ``nodes`` holds one time per slot; an impulse time occurs twice
    (left slot then right slot).  ``grid`` is the deduplicated strictly
    increasing time axis; ``left_slot``/``right_slot`` map each grid index
    to the slot representing the one-sided limit there.
    """

    nodes: np.ndarray
    grid: np.ndarray
    left_slot: np.ndarray
    right_slot: np.ndarray
    impulse_times: np.ndarray

    @property
    def t0(self) -> float:
        return float(self.grid[0])

    @property
    def horizon(self) -> float:
        return float(self.grid[-1])

    @property
    def n_slots(self) -> int:
        return self.nodes.size

    def impulse_slots(self, p):
        """Return (left_slot, right_slot) of the doubled node at time p."""
        idx = np.searchsorted(self.grid, p)
        if idx >= self.grid.size or self.grid[idx] != p or p not in self.impulse_times:
            raise ValueError(f"{p} is not an impulse node of this mesh")
        return int(self.left_slot[idx]), int(self.right_slot[idx])

    def same_layout(self, other) -> bool:
        return self is other or (
            self.nodes.size == other.nodes.size and np.array_equal(self.nodes, other.nodes)
        )


def build_mesh(t0, horizon, impulse_times=(), spacing=0.01):
    """Build a mesh on [t0, horizon] doubled at every interior impulse time.

    Impulse times outside the open interval (t0, horizon) are dropped: a
    jump at or before t0 has no representable left side, and one at or
    beyond the horizon falls outside the truncated domain.  Each smooth
    piece is subdivided uniformly so the node distance stays <= spacing.
    """
    t0 = float(t0)
    horizon = float(horizon)
    if not horizon > t0:
        raise ValueError("horizon must exceed t0")
    if spacing <= 0.0:
        raise ValueError("spacing must be positive")
    pts = np.asarray(sorted(p for p in np.atleast_1d(np.asarray(impulse_times, dtype=float))
                            if t0 < p < horizon), dtype=float)
    if pts.size != np.unique(pts).size:
        raise ValueError("impulse times must be distinct")

    bounds = np.concatenate(([t0], pts, [horizon]))
    nodes = []
    grid = []
    left_slot = []
    right_slot = []
    slot = 0
    for j in range(bounds.size - 1):
        a, b = bounds[j], bounds[j + 1]
        n = max(1, int(math.ceil((b - a) / spacing - 1e-12)))
        seg = np.linspace(a, b, n + 1)
        seg[0], seg[-1] = a, b
        if j == 0:
            for tt in seg:
                nodes.append(tt)
                grid.append(tt)
                left_slot.append(slot)
                right_slot.append(slot)
                slot += 1
        else:
            # seg[0] equals the impulse time already present as grid[-1];
            # it gets a fresh right slot.
            nodes.append(seg[0])
            right_slot[-1] = slot
            slot += 1
            for tt in seg[1:]:
                nodes.append(tt)
                grid.append(tt)
                left_slot.append(slot)
                right_slot.append(slot)
                slot += 1
    return Mesh(
        nodes=np.asarray(nodes, dtype=float),
        grid=np.asarray(grid, dtype=float),
        left_slot=np.asarray(left_slot, dtype=int),
        right_slot=np.asarray(right_slot, dtype=int),
        impulse_times=pts,
    )


@dataclass(frozen=True, eq=False)
class PiecewiseC1Function:
    """Function data on a :class:`Mesh`: per-slot values and derivatives.

    ``tail_slope`` is the slope of the affine extension beyond the horizon:
    it equals both the t -> inf limit of x(t)/(1+t) and of x'(t), so the
    function belongs to the weighted space by construction.
    """

    mesh: Mesh
    values: np.ndarray
    derivs: np.ndarray
    tail_slope: float

    def __post_init__(self):
        if self.values.shape != self.mesh.nodes.shape or self.derivs.shape != self.mesh.nodes.shape:
            raise ValueError("values/derivs must have one entry per mesh slot")

    @property
    def jump_registry(self):
        """Jumps (p, dvalue, dderiv) at each doubled node, derived from slots."""
        out = []
        for p in self.mesh.impulse_times:
            lo, hi = self.mesh.impulse_slots(p)
            out.append((float(p), float(self.values[hi] - self.values[lo]),
                        float(self.derivs[hi] - self.derivs[lo])))
        return tuple(out)

    def _locate(self, t):
        """Map query times to (interval index, exact-node mask, node index)."""
        grid = self.mesh.grid
        pos = np.searchsorted(grid, t, side="left")
        inside = pos < grid.size
        exact = np.zeros(t.shape, dtype=bool)
        exact[inside] = grid[np.minimum(pos[inside], grid.size - 1)] == t[inside]
        return pos, exact

    def __call__(self, t):
        """Evaluate values at times t (left-continuous at impulse points)."""
        return self._eval(t, derivative=False)

    def deriv(self, t):
        """Evaluate the tracked first derivative at times t."""
        return self._eval(t, derivative=True)

    def _eval(self, t, derivative):
        t_in = np.asarray(t, dtype=float)
        t = np.atleast_1d(t_in)
        mesh = self.mesh
        grid = mesh.grid
        if np.any(t < grid[0]):
            raise ValueError(f"evaluation below the working domain start t0={grid[0]}")
        out = np.empty(t.shape, dtype=float)

        beyond = t > grid[-1]
        if np.any(beyond):
            if derivative:
                out[beyond] = self.tail_slope
            else:
                out[beyond] = self.values[-1] + self.tail_slope * (t[beyond] - grid[-1])

        inside = ~beyond
        ti = t[inside]
        pos, exact = self._locate(ti)
        res = np.empty(ti.shape, dtype=float)

        # exact node hits: left slot by the left-continuity convention
        if np.any(exact):
            slots = mesh.left_slot[pos[exact]]
            res[exact] = self.derivs[slots] if derivative else self.values[slots]

        strict = ~exact
        if np.any(strict):
            j = pos[strict] - 1  # grid[j] < t < grid[j+1]
            s_lo = mesh.right_slot[j]
            s_hi = mesh.left_slot[j + 1]
            x0 = grid[j]
            h = grid[j + 1] - x0
            u = (ti[strict] - x0) / h
            v0, v1 = self.values[s_lo], self.values[s_hi]
            d0, d1 = self.derivs[s_lo], self.derivs[s_hi]
            u2 = u * u
            u3 = u2 * u
            if derivative:
                res[strict] = ((6.0 * u2 - 6.0 * u) * (v0 - v1) / h
                               + (3.0 * u2 - 4.0 * u + 1.0) * d0
                               + (3.0 * u2 - 2.0 * u) * d1)
            else:
                h00 = 2.0 * u3 - 3.0 * u2 + 1.0
                h10 = u3 - 2.0 * u2 + u
                h01 = -2.0 * u3 + 3.0 * u2
                h11 = u3 - u2
                res[strict] = h00 * v0 + h * h10 * d0 + h01 * v1 + h * h11 * d1
        out[inside] = res
        if t_in.ndim == 0:
            return float(out[0])
        return out

    def left_limits_at(self, times):
        """(values, derivs) of the left limits at the given node times."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        pos = np.searchsorted(self.mesh.grid, times)
        if np.any(pos >= self.mesh.grid.size) or np.any(self.mesh.grid[pos] != times):
            raise ValueError("left limits requested at non-node times")
        slots = self.mesh.left_slot[pos]
        return self.values[slots], self.derivs[slots]


@dataclass(frozen=True)
class SolutionPair:
    """The pair (u, v); components share t0 and horizon, not the doubling."""

    u: PiecewiseC1Function
    v: PiecewiseC1Function

    def __post_init__(self):
        if (self.u.mesh.t0 != self.v.mesh.t0
                or self.u.mesh.horizon != self.v.mesh.horizon):
            raise ValueError("u and v must share t0 and horizon")


def norm_weighted_sup(x: PiecewiseC1Function) -> float:
    """sup |x(t)| / (1 + t) over node slots, combined with the tail limit."""
    w = np.abs(x.values) / (1.0 + x.mesh.nodes)
    return max(float(w.max()), abs(x.tail_slope))


def norm_deriv_sup(x: PiecewiseC1Function) -> float:
    """sup |x'(t)| over node slots, combined with the tail limit."""
    return max(float(np.abs(x.derivs).max()), abs(x.tail_slope))


def norm_X(s: SolutionPair) -> float:
    """max of the four component norms; the iteration's stopping metric."""
    return max(
        norm_weighted_sup(s.u),
        norm_deriv_sup(s.u),
        norm_weighted_sup(s.v),
        norm_deriv_sup(s.v),
    )


def apply_jump(x: PiecewiseC1Function, p, dv, dd) -> PiecewiseC1Function:
    """Return a copy whose jump at the doubled node p is exactly (dv, dd).

    Slots at and after the right slot of p are shifted by the affine
    correction ``(dv - cur_dv) + (dd - cur_dd) * (t - p)`` so the smooth
    pieces keep their value/derivative consistency; the tail slope absorbs
    the derivative shift.
    """
    lo, hi = x.mesh.impulse_slots(p)
    cur_dv = x.values[hi] - x.values[lo]
    cur_dd = x.derivs[hi] - x.derivs[lo]
    sv = dv - cur_dv
    sd = dd - cur_dd
    values = x.values.copy()
    derivs = x.derivs.copy()
    t_after = x.mesh.nodes[hi:]
    values[hi:] += sv + sd * (t_after - p)
    derivs[hi:] += sd
    return replace(x, values=values, derivs=derivs, tail_slope=x.tail_slope + sd)


def fn_lincomb(a, x: PiecewiseC1Function, b, y: PiecewiseC1Function) -> PiecewiseC1Function:
    """a*x + b*y for functions on the same mesh layout."""
    if not x.mesh.same_layout(y.mesh):
        raise ValueError("lincomb requires identical mesh layouts")
    return PiecewiseC1Function(
        mesh=x.mesh,
        values=a * x.values + b * y.values,
        derivs=a * x.derivs + b * y.derivs,
        tail_slope=a * x.tail_slope + b * y.tail_slope,
    )


def pair_lincomb(a, s1: SolutionPair, b, s2: SolutionPair) -> SolutionPair:
    return SolutionPair(u=fn_lincomb(a, s1.u, b, s2.u), v=fn_lincomb(a, s1.v, b, s2.v))


def _eval_on_slots(fn: PiecewiseC1Function, mesh: Mesh):
    """Evaluate fn at another mesh's slots, honoring left/right sides."""
    tt = mesh.nodes
    vals = np.atleast_1d(fn(tt)).copy()
    ders = np.atleast_1d(fn.deriv(tt)).copy()
    for p in mesh.impulse_times:
        _, hi = mesh.impulse_slots(p)
        if np.isin(p, fn.mesh.impulse_times):
            _, fhi = fn.mesh.impulse_slots(p)
            vals[hi] = fn.values[fhi]
            ders[hi] = fn.derivs[fhi]
    return vals, ders


def difference_norm(sa: SolutionPair, sb: SolutionPair) -> float:
    """||sa - sb||_X over sa's domain, evaluating sb at sa's node slots.

    Meant for refinement studies: sa is the coarser or shorter-domain
    solution and sb must cover its domain.  The tail term compares sa's
    tail slope with sb's derivative at sa's horizon.
    """
    out = 0.0
    for a, b in ((sa.u, sb.u), (sa.v, sb.v)):
        if b.mesh.horizon < a.mesh.horizon or b.mesh.t0 > a.mesh.t0:
            raise ValueError("second pair must cover the first pair's domain")
        bv, bd = _eval_on_slots(b, a.mesh)
        dv = a.values - bv
        dd = a.derivs - bd
        n0 = float(np.max(np.abs(dv) / (1.0 + a.mesh.nodes)))
        n1 = float(np.max(np.abs(dd)))
        tail = abs(a.tail_slope - float(b.deriv(a.mesh.horizon)))
        out = max(out, n0, n1, tail)
    return out


def constant_fn(mesh: Mesh, value=0.0, slope=0.0) -> PiecewiseC1Function:
    """value + slope * t on the given mesh (affine, zero jumps)."""
    return PiecewiseC1Function(
        mesh=mesh,
        values=value + slope * mesh.nodes,
        derivs=np.full(mesh.n_slots, float(slope)),
        tail_slope=float(slope),
    )


def write_csv(x: PiecewiseC1Function, path):
    """Serialize to CSV with columns t, side (-/+ at doubled nodes), value, deriv."""
    doubled_left = {x.mesh.impulse_slots(p)[0] for p in x.mesh.impulse_times}
    doubled_right = {x.mesh.impulse_slots(p)[1] for p in x.mesh.impulse_times}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "side", "value", "deriv"])
        for i, t in enumerate(x.mesh.nodes):
            side = "-" if i in doubled_left else ("+" if i in doubled_right else "")
            w.writerow([repr(float(t)), side, repr(float(x.values[i])), repr(float(x.derivs[i]))])
