"""Interval stepping, matrix assembly, exact half-line windows, matrix files."""

from __future__ import annotations

import json
import os

import numpy as np
import pytest

from advstab import operators, stencil
from advstab.operators import Grid, IterationMatrix, SupportedSequence


def _three_point_display(lam_a: float, nu: float, J: int, k: int) -> np.ndarray:
    """Expected interval matrix, built directly from the displayed entries."""
    am1 = (lam_a + nu) / 2.0
    a0 = 1.0 - nu
    a1 = (nu - lam_a) / 2.0
    n = J + 1
    E = np.zeros((n, n))
    for i in range(n):
        if i > 0:
            E[i, i - 1] = am1
        E[i, i] = a0
        if i + 1 < n:
            E[i, i + 1] = a1
    if k == 1:
        E[n - 1, n - 1] = a0 + a1
        E[n - 1, n - 2] = am1
    elif k == 2:
        E[n - 1, n - 1] = a0 + a1 * 2.0
        E[n - 1, n - 2] = am1 - a1
    else:
        raise ValueError("display known for k = 1, 2 only")
    return E


# ---------------------------------------------------------------------------
# grid

def test_grid_spacing_and_nodes() -> None:
    g = Grid(J=9, L=2.0, lam=0.5)
    assert g.dx == 0.2
    assert g.dt == 0.1
    assert np.allclose(g.xs, np.arange(10) * 0.2)
    assert g.xs[0] == 0.0


def test_grid_validation() -> None:
    with pytest.raises(ValueError):
        Grid(J=0)
    with pytest.raises(ValueError):
        Grid(J=5, L=-1.0)
    with pytest.raises(ValueError):
        Grid(J=5, lam=0.0)


# ---------------------------------------------------------------------------
# interval stepping and assembly

def test_interval_matrices_match_displays_exactly() -> None:
    for lam_a, nu in ((0.5, 0.7), (0.5, 0.75), (0.3, 1.0)):
        s = stencil.builtin("three-point", lam_a=lam_a, nu=nu)
        for k in (1, 2):
            for J in (4, 7, 12):
                A = operators.assemble_matrix(s, k, J)
                assert np.array_equal(A.entries, _three_point_display(lam_a, nu, J, k))


def test_step_interval_agrees_with_matrix_product() -> None:
    rng = np.random.default_rng(5)
    cases = [
        (stencil.builtin("lax-wendroff", lam_a=0.5), 1, 25),
        (stencil.builtin("three-point", lam_a=0.4, nu=0.6), 2, 30),
        (stencil.builtin("coeff1"), 1, 40),
        (stencil.builtin("coeff2"), 2, 40),
    ]
    for scheme, k, J in cases:
        A = operators.assemble_matrix(scheme, k, J).entries
        u = rng.standard_normal(J + 1)
        direct = operators.step_interval(scheme, k, u)
        assert np.allclose(direct, A @ u, rtol=1e-13, atol=1e-14)


def test_step_interval_dirichlet_side_sees_zero_ghosts() -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.7)
    u = np.zeros(8)
    u[0] = 1.0
    v = operators.step_interval(s, 1, u)
    # column 0 of the display: a_0 at row 0, a_{-1} at row 1
    assert v[0] == 1.0 - 0.7
    assert v[1] == (0.5 + 0.7) / 2.0
    assert np.all(v[2:] == 0.0)


def test_step_interval_first_order_ghosts_copy_boundary() -> None:
    s = stencil.builtin("coeff1")
    rng = np.random.default_rng(9)
    u = rng.standard_normal(20)
    v = operators.step_interval(s, 1, u)
    # same result from an explicit extension with constant right tail
    ext = np.concatenate([np.zeros(7), u, np.full(7, u[-1])])
    expected = np.correlate(ext, s.coeffs_float, mode="valid")
    assert np.array_equal(v, expected)


def test_step_interval_rejects_small_grids() -> None:
    s = stencil.builtin("coeff1")
    with pytest.raises(ValueError):
        operators.step_interval(s, 1, np.zeros(10))  # needs r + p = 14
    with pytest.raises(ValueError):
        operators.step_interval(stencil.builtin("upwind", lam_a=0.5), 3, np.zeros(2))


def test_assemble_matrix_guards_dimension() -> None:
    s = stencil.builtin("upwind", lam_a=0.5)
    with pytest.raises(ValueError):
        operators.assemble_matrix(s, 1, operators.MAX_DENSE_DIMENSION + 5)


def test_identity_scheme_assembles_identity_matrix() -> None:
    s = stencil.builtin("identity")
    A = operators.assemble_matrix(s, 1, 6)
    assert np.array_equal(A.entries, np.eye(7))


# ---------------------------------------------------------------------------
# supported sequences and exact half-line windows

def test_supported_sequence_basics() -> None:
    u = SupportedSequence(values=np.array([1.0, 2.0, 3.0]), offset=-1)
    assert u.support == (-1, 1)
    assert u.value_at(-1) == 1.0
    assert u.value_at(5) == 0.0
    assert u.norm() == np.sqrt(14.0)
    t = SupportedSequence(values=np.array([0.0, 5.0, 0.0]), offset=2).trimmed()
    assert t.support == (3, 3)
    assert t.values.tolist() == [5.0]


def _manual_lattice_step(scheme: stencil.Scheme, u: SupportedSequence, j: int) -> float:
    return sum(
        float(a) * u.value_at(j + ell)
        for a, ell in zip(scheme.coeffs_float, scheme.ells)
    )


def test_step_lattice_matches_pointwise_convolution() -> None:
    rng = np.random.default_rng(13)
    s = stencil.builtin("coeff2")
    u = SupportedSequence(values=rng.standard_normal(11), offset=-4)
    v = operators.step_lattice(s, u)
    m, M = u.support
    assert v.support == (m - s.p, M + s.r)
    for j in range(m - s.p - 2, M + s.r + 3):
        assert abs(v.value_at(j) - _manual_lattice_step(s, u, j)) < 1e-13


def test_halfline_inflow_matches_lattice_away_from_boundary() -> None:
    rng = np.random.default_rng(17)
    s = stencil.builtin("coeff1")
    u = SupportedSequence(values=rng.standard_normal(9), offset=30)
    free = operators.step_lattice(s, u)
    closed = operators.step_halfline_inflow(s, u)
    for j in range(0, 60):
        assert abs(closed.value_at(j) - free.value_at(j)) < 1e-14


def test_halfline_inflow_zero_ghosts_at_boundary() -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.7)
    u = SupportedSequence(values=np.array([1.0]), offset=0)
    v = operators.step_halfline_inflow(s, u)
    # v_0 = a_0 u_0 (left neighbor is the Dirichlet zero), v_1 = a_{-1} u_0
    assert v.value_at(0) == 1.0 - 0.7
    assert v.value_at(1) == (0.5 + 0.7) / 2.0
    assert v.value_at(-1) == 0.0


def test_halfline_inflow_rejects_negative_support() -> None:
    s = stencil.builtin("upwind", lam_a=0.5)
    with pytest.raises(ValueError):
        operators.step_halfline_inflow(
            s, SupportedSequence(values=np.ones(3), offset=-1)
        )


def test_halfline_outflow_matches_lattice_away_from_boundary() -> None:
    rng = np.random.default_rng(19)
    s = stencil.builtin("coeff2")
    u = SupportedSequence(values=rng.standard_normal(9), offset=-60)
    free = operators.step_lattice(s, u)
    closed = operators.step_halfline_outflow(s, 2, u, J=0)
    for j in range(-75, 1):
        assert abs(closed.value_at(j) - free.value_at(j)) < 1e-14


def test_halfline_outflow_first_order_ghosts() -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.7)
    u = SupportedSequence(values=np.array([2.0]), offset=0)
    v = operators.step_halfline_outflow(s, 1, u, J=0)
    # ghost copies u_J: v_J = (a_0 + a_1) u_J; below, v_{J-1} = a_1 u_J
    assert v.value_at(0) == (1.0 - 0.7 + (0.7 - 0.5) / 2.0) * 2.0
    assert v.value_at(-1) == (0.7 - 0.5) / 2.0 * 2.0


def test_halfline_outflow_agrees_with_interval_far_from_inflow() -> None:
    # interval state supported near the outflow boundary: one step of the
    # interval equals one step of the outflow half-line shifted to j <= J
    rng = np.random.default_rng(23)
    s = stencil.builtin("coeff1")
    k, J = 1, 60
    u = np.zeros(J + 1)
    u[-12:] = rng.standard_normal(12)
    v_interval = operators.step_interval(s, k, u)
    seq = SupportedSequence(values=u[-12:], offset=J - 11)
    v_half = operators.step_halfline_outflow(s, k, seq, J=J)
    for j in range(J - 20, J + 1):
        assert abs(v_half.value_at(j) - v_interval[j]) < 1e-13


def test_halfline_outflow_rejects_support_beyond_boundary() -> None:
    s = stencil.builtin("upwind", lam_a=0.5)
    with pytest.raises(ValueError):
        operators.step_halfline_outflow(
            s, 1, SupportedSequence(values=np.ones(3), offset=5), J=6
        )


# ---------------------------------------------------------------------------
# matrix files

def test_matrix_save_load_round_trip(tmp_path) -> None:
    s = stencil.builtin("three-point", lam_a=0.5, nu=0.7)
    A = operators.assemble_matrix(s, 2, 12)
    path = str(tmp_path / "A.bin")
    written = operators.save_matrix(A, path)
    back = operators.load_matrix(path)
    assert np.array_equal(back.entries, A.entries)
    assert back.scheme_name == A.scheme_name
    assert (back.k, back.J, back.n) == (A.k, A.J, A.n)
    assert path in written and path + ".json" in written
    sidecar = json.loads(open(path + ".json").read())
    assert sidecar["n"] == 13 and sidecar["k"] == 2 and sidecar["J"] == 12


def test_matrix_csv_only_below_limit(tmp_path) -> None:
    s = stencil.builtin("upwind", lam_a=0.5)
    small = operators.assemble_matrix(s, 1, 10)
    big = operators.assemble_matrix(s, 1, 70)
    p1 = str(tmp_path / "small.bin")
    p2 = str(tmp_path / "big.bin")
    w1 = operators.save_matrix(small, p1)
    w2 = operators.save_matrix(big, p2)
    assert p1 + ".csv" in w1 and os.path.exists(p1 + ".csv")
    assert p2 + ".csv" not in w2 and not os.path.exists(p2 + ".csv")
    rows = open(p1 + ".csv").read().strip().splitlines()
    assert len(rows) == 11
    first = [float(x) for x in rows[0].split(",")]
    assert first == list(small.entries[0])


def test_matrix_writes_leave_no_temp_files(tmp_path) -> None:
    s = stencil.builtin("upwind", lam_a=0.5)
    A = operators.assemble_matrix(s, 1, 5)
    operators.save_matrix(A, str(tmp_path / "A.bin"))
    names = sorted(f.name for f in tmp_path.iterdir())
    assert names == ["A.bin", "A.bin.csv", "A.bin.json"]


def test_iteration_matrix_validation() -> None:
    with pytest.raises(ValueError):
        IterationMatrix(entries=np.zeros((3, 4)), scheme_name="x", k=1, J=2)
