"""The fixed-point operator T = (T1, T2): kernel integrals plus impulse sums.

For the first component,

    T1(u,v)(t) = A1 + B1*t
               + sum_{t0 < t_k < t} [ I0k + I1k * (t - t_k) ]
               - t * sum_k I1k
               + integral_{t0}^{H} G(t, s) f(s, u, v, u', v') ds,

with the derivative (obtained by differentiating the representation)

    T1(u,v)'(t) = B1 + sum_{t0 < t_k < t} I1k - sum_k I1k
                - integral_t^{H} f(s, ...) ds.

The infinite impulse sum and the semi-infinite integral are truncated at the
horizon H; a :class:`TruncationReport` carries bounds or estimates of the
discarded tails.  Impulse-map arguments use left limits, matching the
left-continuity convention, and jumps are inserted algebraically (the right
slot is literally left slot + jump), never through quadrature.  Impulse
times at or below the working-domain start t0 have no representable left
side and are excluded from all sums.

Evaluation at distinct output nodes is independent; the implementation is
vectorized with a fixed summation order, so results are deterministic for a
fixed configuration.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss

from .fnspace import PiecewiseC1Function, SolutionPair, build_mesh
from .model import ImpulsiveCoupledBVP

__all__ = [
    "QuadratureConfig",
    "TruncationReport",
    "EvaluationError",
    "apply_T1",
    "apply_T",
    "semiinfinite_integral",
    "impulse_sums",
    "problem_meshes",
]


class EvaluationError(RuntimeError):
    """A right-hand side returned a non-finite value; carries the location."""

    def __init__(self, name, s, args):
        self.location = {"rhs": name, "s": float(s),
                         "args": tuple(float(a) for a in args)}
        super().__init__(
            f"{name} returned a non-finite value at s={s:.6g} with "
            f"(x,y,z,w)={tuple(round(float(a), 6) for a in args)}"
        )


@dataclass(frozen=True)
class QuadratureConfig:
    """Truncation, mesh, and quadrature parameters.

    ``tail_bound_fn`` (and ``tail_bound_fn_h``) map t to an upper bound of
    the integrable dominator's tail integral past t; alternatively, set
    ``bound_rho`` to pull tail bounds out of the problem's attached
    Caratheodory bounds at that radius.  Without either, tails are
    estimated by geometric extrapolation of the observed decay and flagged
    when the estimate exceeds ``abs_tol``.
    """

    horizon: float = 40.0
    mesh_spacing: float = 0.01
    panels_per_piece: int = 16
    gauss_order: int = 8
    abs_tol: float = 1e-8
    tail_bound_fn: Optional[Callable[[float], float]] = None
    tail_bound_fn_h: Optional[Callable[[float], float]] = None
    bound_rho: Optional[float] = None

    def __post_init__(self):
        if self.horizon <= 0 or self.mesh_spacing <= 0:
            raise ValueError("horizon and mesh_spacing must be positive")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


@dataclass(frozen=True)
class TruncationReport:
    """Estimates of the mass discarded by truncating at the horizon."""

    integral_tail_estimate: float
    impulse_tail_estimate: float
    K_used: int
    tails_are_bounds: bool = False
    warn_integral_tail: bool = False

    def merged(self, other: "TruncationReport") -> "TruncationReport":
        return TruncationReport(
            integral_tail_estimate=max(self.integral_tail_estimate,
                                       other.integral_tail_estimate),
            impulse_tail_estimate=max(self.impulse_tail_estimate,
                                      other.impulse_tail_estimate),
            K_used=max(self.K_used, other.K_used),
            tails_are_bounds=self.tails_are_bounds and other.tails_are_bounds,
            warn_integral_tail=self.warn_integral_tail or other.warn_integral_tail,
        )

    def to_dict(self):
        return {
            "integral_tail_estimate": self.integral_tail_estimate,
            "impulse_tail_estimate": self.impulse_tail_estimate,
            "K_used": self.K_used,
            "tails_are_bounds": self.tails_are_bounds,
            "warn_integral_tail": self.warn_integral_tail,
        }


def problem_meshes(p: ImpulsiveCoupledBVP, q: QuadratureConfig):
    """The (u, v) meshes the operator works on: doubled at each component's
    schedule points inside (t0, horizon)."""
    mu = build_mesh(p.t0, q.horizon, p.u_schedule.points_between(p.t0, q.horizon),
                    q.mesh_spacing)
    mv = build_mesh(p.t0, q.horizon, p.v_schedule.points_between(p.t0, q.horizon),
                    q.mesh_spacing)
    return mu, mv


def _gauss_panels(breaks, order):
    """Gauss-Legendre points/weights per panel: arrays (npanels, order)."""
    xg, wg = leggauss(order)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    half = 0.5 * np.diff(breaks)
    return mid[:, None] + half[:, None] * xg[None, :], half[:, None] * wg[None, :]


def _refined_boundaries(grid, hard, panels_per_piece):
    """Panel boundaries: the given grid, with every piece between hard
    breakpoints holding at least ``panels_per_piece`` panels."""
    pieces = np.concatenate(([grid[0]], hard, [grid[-1]]))
    pieces = np.unique(pieces)
    out = grid
    for a, b in zip(pieces[:-1], pieces[1:]):
        inside = np.count_nonzero((out > a) & (out < b))
        if inside + 1 < panels_per_piece:
            out = np.union1d(out, np.linspace(a, b, panels_per_piece + 1))
    return out


def _rhs_values(rhs, spts, s: SolutionPair):
    flat = spts.ravel()
    U = s.u(flat)
    V = s.v(flat)
    dU = s.u.deriv(flat)
    dV = s.v.deriv(flat)
    vals = rhs(flat, U, V, dU, dV)
    bad = ~np.isfinite(vals)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise EvaluationError(rhs.name, flat[i], (U[i], V[i], dU[i], dV[i]))
    return vals.reshape(spts.shape)


def _geometric_tail(chunks):
    """Extrapolate a tail from the last two mass chunks; inf if not decaying."""
    prev, last = chunks
    if last == 0.0:
        return 0.0
    if prev <= last:
        return math.inf
    r = last / prev
    return last * r / (1.0 - r)


def _integral_tail(q, rhs_side, bounds, moments, boundaries, horizon):
    """(estimate, is_bound, warn) for the integral tail past the horizon."""
    fn = q.tail_bound_fn if rhs_side == "f" else q.tail_bound_fn_h
    if fn is not None:
        return float(fn(horizon)), True, False
    if q.bound_rho is not None and bounds is not None:
        tail = bounds.tail_integral_f if rhs_side == "f" else bounds.tail_integral_h
        if tail is not None:
            return float(tail(q.bound_rho, horizon)), True, False
    # decay heuristic on |panel mass| over the last two quarters of the range
    t0 = boundaries[0]
    mids = 0.5 * (boundaries[1:] + boundaries[:-1])
    absmass = np.abs(moments)
    q3 = t0 + 0.75 * (horizon - t0)
    q2 = t0 + 0.50 * (horizon - t0)
    last = float(absmass[mids >= q3].sum())
    prev = float(absmass[(mids >= q2) & (mids < q3)].sum())
    est = _geometric_tail((prev, last))
    return est, False, bool(est > q.abs_tol)


def _impulse_tail(q, bounds, schedule, seq_names, c_abs, horizon):
    """(estimate, is_bound) for the impulse sums cut at the horizon."""
    if schedule.points is not None:
        pts = np.asarray(schedule.points, dtype=float)
        if pts.size == 0 or pts.max() < horizon:
            return 0.0, True  # finite schedule fully inside: nothing discarded
    if q.bound_rho is not None and bounds is not None:
        tail0 = getattr(bounds, seq_names[0])
        tail1 = getattr(bounds, seq_names[1])
        if tail0 is not None and tail1 is not None:
            K = c_abs[0].size
            return (float(tail0(q.bound_rho, K)) + 2.0 * float(tail1(q.bound_rho, K))), True
    # decay heuristic on the evaluated jump magnitudes
    est = 0.0
    for c, weight in zip(c_abs, (1.0, 2.0)):
        if c.size >= 2:
            est += weight * _geometric_tail((float(c[-2]), float(c[-1])))
        elif c.size == 1:
            est += weight * float(c[-1])
    return est, False


def _component_apply(A, B, sched_pts, m0_map, m1_map, x_self, out_mesh,
                     boundaries, C0, C1, total0):
    """Assemble one operator component on its output mesh."""
    nodes = out_mesh.nodes
    K = sched_pts.size
    if K:
        a_left, b_left = x_self.left_limits_at(sched_pts)
        c0 = np.atleast_1d(m0_map(sched_pts, a_left, b_left)).astype(float)
        c1 = np.atleast_1d(m1_map(sched_pts, a_left, b_left)).astype(float)
        bad = ~(np.isfinite(c0) & np.isfinite(c1))
        if np.any(bad):
            i = int(np.nonzero(bad)[0][0])
            raise EvaluationError("impulse map", sched_pts[i],
                                  (a_left[i], b_left[i], c0[i], c1[i]))
    else:
        c0 = np.zeros(0)
        c1 = np.zeros(0)
    prefix0 = np.concatenate(([0.0], np.cumsum(c0)))
    prefix1 = np.concatenate(([0.0], np.cumsum(c1)))
    prefix1p = np.concatenate(([0.0], np.cumsum(c1 * sched_pts)))
    S1 = prefix1[-1]

    gidx = np.searchsorted(boundaries, out_mesh.grid)
    ival_grid = -(C1[gidx] + out_mesh.grid * (total0 - C0[gidx]))
    ider_grid = -(total0 - C0[gidx])

    slot_to_grid = np.empty(out_mesh.n_slots, dtype=int)
    gr = np.arange(out_mesh.grid.size)
    slot_to_grid[out_mesh.left_slot] = gr
    slot_to_grid[out_mesh.right_slot] = gr

    cnt = np.searchsorted(sched_pts, nodes, side="left")
    right_slots = np.asarray(
        [out_mesh.impulse_slots(pp)[1] for pp in out_mesh.impulse_times], dtype=int)
    if right_slots.size:
        cnt[right_slots] += 1

    pulse_val = prefix0[cnt] + nodes * prefix1[cnt] - prefix1p[cnt]
    pulse_der = prefix1[cnt]

    values = A + B * nodes + pulse_val - nodes * S1 + ival_grid[slot_to_grid]
    derivs = B + pulse_der - S1 + ider_grid[slot_to_grid]

    # insert the jumps algebraically: right slot = left slot + jump, exactly
    for k, pp in enumerate(out_mesh.impulse_times):
        lo, hi = out_mesh.impulse_slots(pp)
        values[hi] = values[lo] + c0[k]
        derivs[hi] = derivs[lo] + c1[k]

    out = PiecewiseC1Function(mesh=out_mesh, values=values, derivs=derivs,
                              tail_slope=float(B))
    return out, c0, c1


def _panel_setup(p: ImpulsiveCoupledBVP, s: SolutionPair, q: QuadratureConfig):
    if s.u.mesh.horizon != q.horizon:
        raise ValueError("iterate horizon does not match the quadrature config")
    hard = np.union1d(s.u.mesh.impulse_times, s.v.mesh.impulse_times)
    boundaries = np.union1d(s.u.mesh.grid, s.v.mesh.grid)
    boundaries = _refined_boundaries(boundaries, hard, q.panels_per_piece)
    spts, wts = _gauss_panels(boundaries, q.gauss_order)
    return boundaries, spts, wts


def _moments(boundaries, spts, wts, rvals):
    m0 = (wts * rvals).sum(axis=1)
    m1 = (wts * spts * rvals).sum(axis=1)
    C0 = np.concatenate(([0.0], np.cumsum(m0)))
    C1 = np.concatenate(([0.0], np.cumsum(m1)))
    return m0, C0, C1


def _check_mesh_matches(mesh, sched, p, q, which):
    pts = sched.points_between(p.t0, q.horizon)
    if not np.array_equal(mesh.impulse_times, pts):
        raise ValueError(
            f"{which}-mesh impulse nodes do not match the schedule inside "
            f"(t0, horizon); rebuild the iterate with problem_meshes()")


def apply_T1(p: ImpulsiveCoupledBVP, s: SolutionPair, q: QuadratureConfig):
    """First operator component; returns (function, TruncationReport)."""
    _check_mesh_matches(s.u.mesh, p.u_schedule, p, q, "u")
    boundaries, spts, wts = _panel_setup(p, s, q)
    rvals = _rhs_values(p.f, spts, s)
    m0, C0, C1 = _moments(boundaries, spts, wts, rvals)
    pts = p.u_schedule.points_between(p.t0, q.horizon)
    out, c0, c1 = _component_apply(p.boundary.A1, p.boundary.B1, pts, p.I0, p.I1,
                                   s.u, s.u.mesh, boundaries, C0, C1, C0[-1])
    int_tail, int_is_bound, warn = _integral_tail(q, "f", p.bounds, m0,
                                                  boundaries, q.horizon)
    imp_tail, imp_is_bound = _impulse_tail(q, p.bounds, p.u_schedule,
                                           ("seq_tail_phi", "seq_tail_psi"),
                                           (np.abs(c0), np.abs(c1)), q.horizon)
    report = TruncationReport(
        integral_tail_estimate=int_tail,
        impulse_tail_estimate=imp_tail,
        K_used=int(pts.size),
        tails_are_bounds=int_is_bound and imp_is_bound,
        warn_integral_tail=warn,
    )
    return out, report


def apply_T(p: ImpulsiveCoupledBVP, s: SolutionPair, q: QuadratureConfig):
    """Both components on shared quadrature panels; reports are merged."""
    _check_mesh_matches(s.u.mesh, p.u_schedule, p, q, "u")
    _check_mesh_matches(s.v.mesh, p.v_schedule, p, q, "v")
    boundaries, spts, wts = _panel_setup(p, s, q)

    fvals = _rhs_values(p.f, spts, s)
    m0f, C0f, C1f = _moments(boundaries, spts, wts, fvals)
    pts_u = p.u_schedule.points_between(p.t0, q.horizon)
    out_u, c0u, c1u = _component_apply(p.boundary.A1, p.boundary.B1, pts_u,
                                       p.I0, p.I1, s.u, s.u.mesh,
                                       boundaries, C0f, C1f, C0f[-1])

    hvals = _rhs_values(p.h, spts, s)
    m0h, C0h, C1h = _moments(boundaries, spts, wts, hvals)
    pts_v = p.v_schedule.points_between(p.t0, q.horizon)
    out_v, c0v, c1v = _component_apply(p.boundary.A2, p.boundary.B2, pts_v,
                                       p.J0, p.J1, s.v, s.v.mesh,
                                       boundaries, C0h, C1h, C0h[-1])

    tf, bf, wf = _integral_tail(q, "f", p.bounds, m0f, boundaries, q.horizon)
    th, bh, wh = _integral_tail(q, "h", p.bounds, m0h, boundaries, q.horizon)
    iu, ibu = _impulse_tail(q, p.bounds, p.u_schedule,
                            ("seq_tail_phi", "seq_tail_psi"),
                            (np.abs(c0u), np.abs(c1u)), q.horizon)
    iv, ibv = _impulse_tail(q, p.bounds, p.v_schedule,
                            ("seq_tail_phij", "seq_tail_theta"),
                            (np.abs(c0v), np.abs(c1v)), q.horizon)
    report_u = TruncationReport(integral_tail_estimate=tf,
                                impulse_tail_estimate=iu,
                                K_used=int(pts_u.size),
                                tails_are_bounds=bf and ibu,
                                warn_integral_tail=wf)
    report_v = TruncationReport(integral_tail_estimate=th,
                                impulse_tail_estimate=iv,
                                K_used=int(pts_v.size),
                                tails_are_bounds=bh and ibv,
                                warn_integral_tail=wh)
    return SolutionPair(u=out_u, v=out_v), report_u.merged(report_v)


def semiinfinite_integral(g, t, q: QuadratureConfig, t0=0.0, breakpoints=()):
    """integral_{t0}^{H} G(t, s) g(s) ds by composite Gauss-Legendre.

    Panels never straddle the kernel kink at s = t or any of the supplied
    breakpoints (impulse times of the integrand's arguments).  The tail
    past the horizon is NOT added; it is the caller's to account for.
    """
    H = q.horizon
    if not 0.0 <= t0 < H:
        raise ValueError("need 0 <= t0 < horizon")
    hard = [float(b) for b in breakpoints if t0 < b < H]
    if t0 < t < H:
        hard.append(float(t))
    hard = np.asarray(sorted(set(hard)), dtype=float)
    pieces = np.concatenate(([t0], hard, [H]))
    boundaries = np.unique(pieces)
    for a, b in zip(pieces[:-1], pieces[1:]):
        n = max(q.panels_per_piece, int(math.ceil((b - a) / max(q.mesh_spacing, 1e-12))))
        boundaries = np.union1d(boundaries, np.linspace(a, b, n + 1))
    spts, wts = _gauss_panels(boundaries, q.gauss_order)
    flat = spts.ravel()
    gv = np.asarray(g(flat), dtype=float)
    if gv.shape != flat.shape:
        gv = np.array([float(g(ss)) for ss in flat])
    bad = ~np.isfinite(gv)
    if np.any(bad):
        i = int(np.nonzero(bad)[0][0])
        raise EvaluationError("integrand", flat[i], (0.0, 0.0, 0.0, 0.0))
    kern = -np.minimum(float(t), flat)
    return float((wts.ravel() * kern * gv).sum())


def impulse_sums(schedule, m0, m1, x: PiecewiseC1Function, t, horizon):
    """Truncated impulse sums at time t.

    Returns ``(partial_sum_at_t, full_sum_deriv)`` where the first is
    sum_{p_k < t} [m0(p_k,.) + m1(p_k,.)(t - p_k)] and the second is
    sum_{p_k < horizon} m1(p_k,.), with arguments (p_k, x(p_k-), x'(p_k-)).
    Points at or below x's domain start are skipped (no left limit exists).
    """
    pts = schedule.points_between(x.mesh.t0, horizon)
    if pts.size == 0:
        return 0.0, 0.0
    a = np.atleast_1d(x(pts))  # left-continuous evaluation = left limits
    b = np.atleast_1d(x.deriv(pts))
    c0 = np.atleast_1d(m0(pts, a, b)).astype(float)
    c1 = np.atleast_1d(m1(pts, a, b)).astype(float)
    before = pts < t
    partial = float(np.sum(c0[before] + c1[before] * (t - pts[before])))
    return partial, float(np.sum(c1))
