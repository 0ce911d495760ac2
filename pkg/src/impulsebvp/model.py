"""Problem statement for the impulsive coupled system on the half-line.

The data here describes the equations ``u'' = f(t,u,v,u',v')``,
``v'' = h(t,u,v,u',v')``, the boundary values ``u(0)=A1``, ``v(0)=A2``,
``u'(+inf)=B1``, ``v'(+inf)=B2``, and jump conditions at two strictly
increasing unbounded schedules of impulse times, with jump sizes produced
by maps of the left limits.  Nothing in this module knows about meshes or
solution methods.

Everything is immutable after construction and the callables are expected
to be pure, so concurrent evaluation is safe.
"""

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "RhsFunction",
    "BoundaryData",
    "ImpulseSchedule",
    "ImpulseMap",
    "ImpulsiveCoupledBVP",
    "ValidationReport",
    "validate_problem",
]

_ENUM_CAP = 10_000_000


def _call_vectorized(fn, *arrays):
    """Call fn on numpy arrays, falling back to a scalar loop."""
    try:
        out = np.asarray(fn(*arrays), dtype=float)
        if out.shape == arrays[0].shape:
            return out
    except (TypeError, ValueError):
        pass
    flat = np.broadcast_arrays(*arrays)
    out = np.array([float(fn(*vals)) for vals in zip(*(a.ravel() for a in flat))])
    return out.reshape(flat[0].shape)


@dataclass(frozen=True)
class RhsFunction:
    """Right-hand side g(t, x, y, z, w) with (x,y,z,w) = (u, v, u', v').

    ``fn`` should accept numpy arrays; scalar-only callables are looped
    over transparently.  ``name``/``params`` identify registry entries for
    problem files and are purely descriptive here.
    """

    fn: Callable
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, t, x, y, z, w):
        t = np.asarray(t, dtype=float)
        x, y, z, w = (np.broadcast_to(np.asarray(a, dtype=float), t.shape) for a in (x, y, z, w))
        return _call_vectorized(self.fn, t, x, y, z, w)


@dataclass(frozen=True)
class BoundaryData:
    """Values at 0 (A1, A2) and derivative limits at +inf (B1, B2)."""

    A1: float
    A2: float
    B1: float
    B2: float

    def __post_init__(self):
        vals = (self.A1, self.A2, self.B1, self.B2)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("boundary data must be finite")


@dataclass(frozen=True)
class ImpulseSchedule:
    """Strictly increasing impulse times diverging to +inf.

    Either an explicit finite tuple ``points`` or a ``rule`` mapping the
    1-based index k to the k-th time.  Infinite schedules are enumerated
    lazily below any finite horizon; the enumeration always terminates
    because the times diverge.
    """

    points: Optional[Sequence[float]] = None
    rule: Optional[Callable[[int], float]] = None

    def __post_init__(self):
        if self.points is not None:
            pts = tuple(float(p) for p in self.points)
            if any(p <= 0 for p in pts):
                raise ValueError("impulse times must be positive")
            if any(b <= a for a, b in zip(pts, pts[1:])):
                raise ValueError("impulse times must be strictly increasing")
            object.__setattr__(self, "points", pts)

    @staticmethod
    def empty():
        return ImpulseSchedule(points=())

    def point(self, k: int) -> float:
        """The k-th impulse time, k >= 1."""
        if k < 1:
            raise ValueError("impulse indices are 1-based")
        if self.points is not None:
            if k > len(self.points):
                raise IndexError(f"schedule has only {len(self.points)} points")
            return self.points[k - 1]
        if self.rule is None:
            raise ValueError("schedule has neither points nor a rule")
        return float(self.rule(k))

    def points_below(self, horizon: float) -> np.ndarray:
        """All schedule times in (0, horizon), in order."""
        if self.points is not None:
            return np.asarray([p for p in self.points if p < horizon], dtype=float)
        out = []
        for k in itertools.count(1):
            p = float(self.rule(k))
            if p >= horizon:
                break
            out.append(p)
            if k > _ENUM_CAP:
                raise RuntimeError("schedule enumeration exceeded the safety cap; "
                                   "does the rule diverge to +inf?")
        return np.asarray(out, dtype=float)

    def points_between(self, lo: float, hi: float) -> np.ndarray:
        pts = self.points_below(hi)
        return pts[pts > lo]

    def count_below(self, horizon: float) -> int:
        return int(self.points_below(horizon).size)


@dataclass(frozen=True)
class ImpulseMap:
    """Jump-size map (p, a, b) -> jump, with (a, b) the left limits (x, x')."""

    fn: Callable
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, p, a, b):
        p = np.asarray(p, dtype=float)
        a = np.broadcast_to(np.asarray(a, dtype=float), p.shape)
        b = np.broadcast_to(np.asarray(b, dtype=float), p.shape)
        return _call_vectorized(self.fn, p, a, b)

    @staticmethod
    def zero():
        return ImpulseMap(fn=lambda p, a, b: np.zeros_like(p), name="zero")


@dataclass(frozen=True)
class ImpulsiveCoupledBVP:
    """The full problem statement, independent of any solution method.

    ``t0`` is the lower cutoff of the working domain: right-hand sides are
    only ever evaluated at t >= t0 (the spring-pendulum instance has a
    1/t^3 factor, so it needs t0 > 0).  Impulse times at or below t0 are
    outside the working domain and are ignored by the operator.
    """

    f: RhsFunction
    h: RhsFunction
    boundary: BoundaryData
    u_schedule: ImpulseSchedule
    v_schedule: ImpulseSchedule
    I0: ImpulseMap
    I1: ImpulseMap
    J0: ImpulseMap
    J1: ImpulseMap
    t0: float = 0.0
    bounds: Optional["CaratheodoryBounds"] = None  # noqa: F821  (audit module)

    def __post_init__(self):
        if self.t0 < 0.0:
            raise ValueError("t0 must be >= 0")


@dataclass
class ValidationReport:
    """Outcome of the static problem checks, one entry per check."""

    checks: list
    passed: bool

    def entries(self, name):
        return [c for c in self.checks if c["name"] == name]


def _check_schedule(name, schedule, horizon, t0):
    entry = {"name": f"{name}_schedule", "passed": True, "details": {}}
    try:
        pts = schedule.points_below(horizon)
    except Exception as exc:  # enumeration failure is a hard failure
        entry["passed"] = False
        entry["details"]["error"] = str(exc)
        return entry
    bad = np.nonzero(np.diff(pts) <= 0)[0]
    if bad.size:
        entry["passed"] = False
        # 1-based index of the first offending point
        entry["details"]["non_monotone_at_index"] = int(bad[0] + 2)
    entry["details"]["count_below_horizon"] = int(pts.size)
    skipped = pts[pts <= t0]
    if skipped.size:
        entry["details"]["points_at_or_below_t0"] = [float(p) for p in skipped]
    return entry


def validate_problem(p: ImpulsiveCoupledBVP, horizon: float, seed: int = 0,
                     samples: int = 200) -> ValidationReport:
    """Static checks: schedule monotonicity below the horizon, finiteness of
    f and h on sampled working-domain states, and continuity sampling of the
    impulse maps.

    Non-finite right-hand-side samples become report entries with the
    offending location; a non-monotone schedule is a hard failure.  The
    report is deterministic for a fixed seed.
    """
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    rng = np.random.default_rng(seed)
    checks = []

    checks.append(_check_schedule("u", p.u_schedule, horizon, p.t0))
    checks.append(_check_schedule("v", p.v_schedule, horizon, p.t0))

    lo = max(p.t0, 1e-6) if p.t0 > 0 else 0.0
    t = rng.uniform(lo, horizon, size=samples)
    x = rng.uniform(-2.0, 2.0, size=samples) * (1.0 + t)
    y = rng.uniform(-2.0, 2.0, size=samples) * (1.0 + t)
    z = rng.uniform(-2.0, 2.0, size=samples)
    w = rng.uniform(-2.0, 2.0, size=samples)
    for name, fn in (("f", p.f), ("h", p.h)):
        entry = {"name": f"{name}_finite", "passed": True, "details": {}}
        try:
            vals = fn(t, x, y, z, w)
            bad = ~np.isfinite(vals)
            if np.any(bad):
                i = int(np.nonzero(bad)[0][0])
                entry["passed"] = False
                entry["details"]["first_nonfinite"] = {
                    "t": float(t[i]), "x": float(x[i]), "y": float(y[i]),
                    "z": float(z[i]), "w": float(w[i]),
                }
        except Exception as exc:
            entry["passed"] = False
            entry["details"]["error"] = str(exc)
        checks.append(entry)

    eps = 1e-6
    for name, m, sched in (("I0", p.I0, p.u_schedule), ("I1", p.I1, p.u_schedule),
                           ("J0", p.J0, p.v_schedule), ("J1", p.J1, p.v_schedule)):
        entry = {"name": f"{name}_continuity", "passed": True, "details": {}}
        pts = sched.points_below(horizon)[:20]
        if pts.size:
            a = rng.uniform(-2.0, 2.0, size=pts.size) * (1.0 + pts)
            b = rng.uniform(-2.0, 2.0, size=pts.size)
            try:
                base = m(pts, a, b)
                wiggle = np.maximum(
                    np.abs(m(pts, a + eps, b) - base),
                    np.abs(m(pts, a, b + eps) - base),
                )
                scale = 1.0 + np.abs(base)
                bad = wiggle > 0.1 * scale
                if np.any(bad):
                    i = int(np.nonzero(bad)[0][0])
                    entry["passed"] = False
                    entry["details"]["discontinuity_near"] = {
                        "p": float(pts[i]), "a": float(a[i]), "b": float(b[i]),
                        "wiggle": float(wiggle[i]),
                    }
            except Exception as exc:
                entry["passed"] = False
                entry["details"]["error"] = str(exc)
        checks.append(entry)

    return ValidationReport(checks=checks, passed=all(c["passed"] for c in checks))
