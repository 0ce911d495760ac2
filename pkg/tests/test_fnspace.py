import numpy as np
import pytest

from impulsebvp.fnspace import (PiecewiseC1Function, apply_jump, build_mesh,
                                constant_fn, difference_norm, fn_lincomb,
                                norm_X, norm_deriv_sup, norm_weighted_sup,
                                pair_lincomb, write_csv, SolutionPair)


def from_callable(mesh, fn, dfn, tail=0.0):
    t = mesh.nodes
    return PiecewiseC1Function(mesh=mesh, values=fn(t), derivs=dfn(t),
                               tail_slope=tail)


def test_mesh_doubles_impulse_nodes():
    m = build_mesh(0.0, 10.0, [1.0, 4.5], spacing=0.5)
    assert m.grid[0] == 0.0 and m.grid[-1] == 10.0
    assert np.all(np.diff(m.grid) > 0)
    # doubled nodes: two slots at each impulse time, ordered left then right
    for p in (1.0, 4.5):
        lo, hi = m.impulse_slots(p)
        assert hi == lo + 1
        assert m.nodes[lo] == p == m.nodes[hi]
    assert m.n_slots == m.grid.size + 2


def test_mesh_drops_impulses_outside_open_interval():
    m = build_mesh(1.0, 10.0, [0.5, 1.0, 3.0, 10.0, 12.0], spacing=0.5)
    assert list(m.impulse_times) == [3.0]


def test_mesh_rejects_bad_inputs():
    with pytest.raises(ValueError):
        build_mesh(5.0, 5.0, [], spacing=0.1)
    with pytest.raises(ValueError):
        build_mesh(0.0, 1.0, [], spacing=-1.0)


def test_evaluation_left_continuous_at_impulse():
    m = build_mesh(0.0, 5.0, [2.0], spacing=0.25)
    x = constant_fn(m, 0.0, 0.0)
    x = apply_jump(x, 2.0, 1.0, 0.0)
    assert x(2.0) == 0.0           # value AT the impulse is the left limit
    assert x(2.0 + 1e-9) == pytest.approx(1.0, abs=1e-8)
    assert x(5.0) == 1.0
    assert x(1.0) == 0.0


def test_derivative_also_left_continuous_at_impulse():
    m = build_mesh(0.0, 5.0, [2.0], spacing=0.25)
    x = apply_jump(constant_fn(m, 0.0, 1.0), 2.0, 0.0, 0.5)
    assert x.deriv(2.0) == 1.0
    assert x.deriv(2.0 + 1e-9) == pytest.approx(1.5, abs=1e-7)
    # mixed array query: exact node, interior point, tail
    out = x.deriv(np.array([2.0, 2.5, 10.0]))
    assert out[0] == 1.0 and out[1] == pytest.approx(1.5, abs=1e-9)
    assert out[2] == 1.5


def test_evaluation_matches_hermite_data_between_nodes():
    m = build_mesh(0.0, 8.0, [], spacing=0.05)
    x = from_callable(m, np.sin, np.cos)
    t = np.linspace(0.0, 8.0, 1777)
    # cubic Hermite on exact data: O(h^4) interpolation error
    assert np.max(np.abs(x(t) - np.sin(t))) < 1e-6
    assert np.max(np.abs(x.deriv(t) - np.cos(t))) < 1e-4


def test_affine_tail_extension():
    m = build_mesh(0.0, 10.0, [], spacing=0.5)
    x = constant_fn(m, 1.0, 2.0)
    assert x(15.0) == 1.0 + 2.0 * 15.0
    assert x.deriv(200.0) == 2.0
    with pytest.raises(ValueError):
        x(-0.5)


def test_norm_weighted_sup_examples():
    m = build_mesh(0.0, 40.0, [], spacing=0.1)
    # constant c: |c|/(1+t) maximal at t0 = 0
    assert norm_weighted_sup(constant_fn(m, -3.0, 0.0)) == 3.0
    # x(t) = t with tail slope 1: grid sup approaches 1, the limit term is 1
    assert norm_weighted_sup(constant_fn(m, 0.0, 1.0)) == 1.0
    # x(t) = 1 + t: ratio is 1 everywhere
    assert norm_weighted_sup(constant_fn(m, 1.0, 1.0)) == 1.0


def test_norm_deriv_sup_examples():
    m = build_mesh(0.0, 4.0 * np.pi, [], spacing=0.01)
    assert norm_deriv_sup(constant_fn(m, 5.0, 0.0)) == 0.0
    assert norm_deriv_sup(constant_fn(m, 0.0, 1.0)) == 1.0
    x = from_callable(m, lambda t: -np.cos(t), lambda t: np.sin(t))
    # dense-grid maximum of |sin| is 1 within the mesh resolution
    assert norm_deriv_sup(x) == pytest.approx(1.0, abs=1e-4)


def test_norm_X_componentwise_and_symmetry():
    m = build_mesh(0.0, 40.0, [], spacing=0.1)
    u = constant_fn(m, 2.0, 0.0)           # ||u||_0 = 2
    v = constant_fn(m, 0.0, 1.0)           # ||v||_0 -> 1, ||v'||_1 = 1
    s = SolutionPair(u=u, v=v)
    assert norm_X(s) == 2.0
    assert norm_X(SolutionPair(u=v, v=u)) == 2.0
    z = SolutionPair(u=constant_fn(m), v=constant_fn(m))
    assert norm_X(z) == 0.0


def test_norm_scaling_and_triangle_inequality():
    rng = np.random.default_rng(3)
    m = build_mesh(0.0, 10.0, [2.0], spacing=0.2)
    for _ in range(20):
        def rand_fn():
            return PiecewiseC1Function(
                mesh=m, values=rng.normal(size=m.n_slots),
                derivs=rng.normal(size=m.n_slots),
                tail_slope=float(rng.normal()))
        a = SolutionPair(u=rand_fn(), v=rand_fn())
        b = SolutionPair(u=rand_fn(), v=rand_fn())
        lam = float(rng.normal())
        scaled = pair_lincomb(lam, a, 0.0, a)
        assert norm_X(scaled) == pytest.approx(abs(lam) * norm_X(a), rel=1e-12)
        total = pair_lincomb(1.0, a, 1.0, b)
        assert norm_X(total) <= norm_X(a) + norm_X(b) + 1e-12


def test_apply_jump_identity_and_step():
    m = build_mesh(0.0, 5.0, [1.0], spacing=0.25)
    x = constant_fn(m, 0.7, -0.3)
    same = apply_jump(x, 1.0, 0.0, 0.0)
    assert np.array_equal(same.values, x.values)
    assert np.array_equal(same.derivs, x.derivs)

    step = apply_jump(constant_fn(m, 0.0, 0.0), 1.0, 1.0, 0.0)
    assert step(0.5) == 0.0 and step(1.0) == 0.0
    assert step(1.5) == 1.0 and step(5.0) == 1.0
    assert step.jump_registry == ((1.0, 1.0, 0.0),)


def test_apply_jump_sets_exact_jump_and_updates_tail():
    m = build_mesh(0.0, 5.0, [1.0, 3.0], spacing=0.25)
    x = constant_fn(m, 0.0, 1.0)
    x = apply_jump(x, 1.0, 0.5, -0.25)
    x = apply_jump(x, 3.0, 0.0, 0.5)
    reg = dict((p, (dv, dd)) for p, dv, dd in x.jump_registry)
    assert reg[1.0] == (0.5, -0.25)
    assert reg[3.0] == (0.0, 0.5)
    assert x.tail_slope == 1.0 - 0.25 + 0.5
    # re-applying replaces, not accumulates
    x = apply_jump(x, 1.0, 0.1, 0.0)
    dv, dd = dict((p, v) for p, *v in x.jump_registry)[1.0]
    assert dv == pytest.approx(0.1, abs=1e-12) and dd == 0.0


def test_two_jumps_compose_additively_on_far_tail():
    m = build_mesh(0.0, 6.0, [1.0, 2.0], spacing=0.2)
    both = apply_jump(apply_jump(constant_fn(m), 1.0, 0.3, 0.0), 2.0, 0.4, 0.0)
    assert both(5.0) == pytest.approx(0.7, abs=1e-15)


def test_apply_jump_rejects_non_impulse_time():
    m = build_mesh(0.0, 5.0, [1.0], spacing=0.25)
    with pytest.raises(ValueError):
        apply_jump(constant_fn(m), 2.0, 1.0, 0.0)


def test_piece_consistency_trapezoid():
    # within each smooth piece the trapezoid rule on derivs reproduces values
    m = build_mesh(0.0, 6.0, [2.5], spacing=0.01)
    x = from_callable(m, lambda t: t ** 2 * np.exp(-t),
                      lambda t: (2 * t - t ** 2) * np.exp(-t))
    t = m.nodes
    for lo, hi in ((0, m.impulse_slots(2.5)[0]), (m.impulse_slots(2.5)[1], m.n_slots - 1)):
        tt = t[lo:hi + 1]
        dd = x.derivs[lo:hi + 1]
        trap = np.concatenate(([0.0], np.cumsum(0.5 * (dd[1:] + dd[:-1]) * np.diff(tt))))
        # accumulated trapezoid error ~ span * h^2 * max|x'''| / 12
        tol = (tt[-1] - tt[0]) * 0.01 ** 2 * 6.0 / 12.0 + 1e-9
        assert np.max(np.abs((x.values[lo:hi + 1] - x.values[lo]) - trap)) < tol


def test_lincomb_requires_matching_layout():
    m1 = build_mesh(0.0, 5.0, [1.0], spacing=0.25)
    m2 = build_mesh(0.0, 5.0, [2.0], spacing=0.25)
    with pytest.raises(ValueError):
        fn_lincomb(1.0, constant_fn(m1), 1.0, constant_fn(m2))


def test_difference_norm_restricts_to_common_domain():
    m_short = build_mesh(0.0, 10.0, [1.0], spacing=0.1)
    m_long = build_mesh(0.0, 20.0, [1.0], spacing=0.1)
    a = SolutionPair(u=constant_fn(m_short, 1.0, 2.0), v=constant_fn(m_short))
    b = SolutionPair(u=constant_fn(m_long, 1.0, 2.0), v=constant_fn(m_long))
    assert difference_norm(a, b) == pytest.approx(0.0, abs=1e-12)
    c = SolutionPair(u=constant_fn(m_long, 1.5, 2.0), v=constant_fn(m_long))
    assert difference_norm(a, c) == pytest.approx(0.5, abs=1e-12)


def test_csv_serialization(tmp_path):
    m = build_mesh(0.0, 2.0, [1.0], spacing=0.5)
    x = apply_jump(constant_fn(m, 0.0, 1.0), 1.0, 0.25, 0.0)
    path = tmp_path / "fn.csv"
    write_csv(x, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,side,value,deriv"
    assert len(lines) == 1 + m.n_slots
    sides = [ln.split(",")[1] for ln in lines[1:]]
    assert sides.count("-") == 1 and sides.count("+") == 1
