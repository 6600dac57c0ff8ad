import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cdlmg import (
    CriticalWindowError,
    DickeSector,
    ModelParams,
    OperatorMatrix,
    StructureError,
    ValidationError,
    analytic_cd,
    band_table,
    build_Bj,
    build_spin_ops,
    exact_cd,
    hp_coefficient,
    hp_correction,
    parity_projectors,
    truncate,
)
from conftest import block_angle_rate_fd, parity_blocks


def sxsy_plus_sysx(n: int) -> np.ndarray:
    ops = build_spin_ops(DickeSector(n))
    return ops.sx.mat @ ops.sy.mat + ops.sy.mat @ ops.sx.mat


# --------------------------------------------------------------------------
# exact term

@pytest.mark.parametrize("h", [0.3, 0.8, 1.2, 2.0])
def test_exact_cd_two_particles_is_single_rotation(h):
    params = ModelParams(2, 0.0)
    rate = block_angle_rate_fd(params, h, hdot=0.5, idx=[0, 2])
    term = exact_cd(params, h, 0.5)
    assert np.max(np.abs(term.mat - rate * sxsy_plus_sysx(2))) < 1e-6


def test_exact_cd_zero_rate_is_zero():
    term = exact_cd(ModelParams(7, 0.0), 0.9, 0.0)
    assert np.max(np.abs(term.mat)) == 0.0


def test_exact_cd_three_particles_two_rotations():
    # two independent 2x2 rotations; collective-operator combination has
    # weights (rate_even + rate_odd)/(2*sqrt(3)) on B0 and
    # (rate_odd - rate_even)/sqrt(3) on B1
    params = ModelParams(3, 0.0)
    h, hdot = 0.7, 0.5
    rate_even = block_angle_rate_fd(params, h, hdot, idx=[0, 2])
    rate_odd = block_angle_rate_fd(params, h, hdot, idx=[1, 3])
    b0 = build_Bj(DickeSector(3), 0).mat
    b1 = build_Bj(DickeSector(3), 1).mat
    combo = ((rate_even + rate_odd) / (2 * np.sqrt(3)) * b0
             + (rate_odd - rate_even) / np.sqrt(3) * b1)
    term = exact_cd(params, h, hdot)
    assert np.max(np.abs(term.mat - combo)) < 1e-6


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("h", [0.2, 0.8, 1.2, 2.0])
def test_analytic_forms_match_exact(n, h):
    params = ModelParams(n, 0.0)
    exact = exact_cd(params, h, 0.5)
    closed = analytic_cd(params, h, 0.5)
    assert closed.mode == f"analytic_n{n}"
    assert np.max(np.abs(exact.mat - closed.mat)) < 1e-8


def test_analytic_only_small_sizes():
    with pytest.raises(ValidationError):
        analytic_cd(ModelParams(4, 0.0), 0.8, 0.5)


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 25), gamma=st.floats(0, 0.9), h=st.floats(0.1, 2.0),
       hdot=st.floats(-1.0, 1.0))
def test_exact_cd_structure_invariants(n, gamma, h, hdot):
    params = ModelParams(n, gamma)
    term = exact_cd(params, h, hdot)
    mat = term.mat
    assert np.max(np.abs(mat - mat.conj().T)) < 1e-12
    assert np.max(np.abs(np.diagonal(mat))) < 1e-12
    pi_e, _ = parity_projectors(params.sector)
    assert np.max(np.abs(mat @ pi_e.mat - pi_e.mat @ mat)) < 1e-10


def test_exact_cd_eigenbasis_round_trip():
    # conjugating by the sector-resolved eigenbasis recovers the
    # i <m|dH0/dt|n> / (E_n - E_m) form
    from cdlmg.spin_algebra import interaction_matrix, parity_indices

    params = ModelParams(9, 0.0)
    h, hdot = 1.1, 0.5
    term = exact_cd(params, h, hdot)
    sector = params.sector
    base = interaction_matrix(sector, 0.0)
    for parity in (0, 1):
        idx = parity_indices(sector, parity)
        block = base[np.ix_(idx, idx)] - 2 * h * np.diag(sector.m_values[idx])
        energies, vectors = np.linalg.eigh(block)
        m = vectors.T @ np.diag(-2 * hdot * sector.m_values[idx]) @ vectors
        de = energies[None, :] - energies[:, None]
        expected = np.where(np.abs(de) > 1e-12, 1j * m / np.where(de == 0, 1, de), 0)
        np.fill_diagonal(expected, 0)
        got = vectors.T @ term.mat[np.ix_(idx, idx)] @ vectors
        assert np.max(np.abs(got - expected)) < 1e-10


# --------------------------------------------------------------------------
# band table and truncation

def test_band_table_two_particles():
    params = ModelParams(2, 0.0)
    h, hdot = 0.8, 0.5
    table = band_table(exact_cd(params, h, hdot))
    assert set(table.bands) == {1}
    rate = block_angle_rate_fd(params, h, hdot, idx=[0, 2])
    # (SxSy+SySx) carries +i on its offset-2 superdiagonal entry for N=2
    assert table.bands[1][0] == pytest.approx(rate, abs=1e-6)


def test_band_table_zero_matrix_is_empty():
    table = band_table(OperatorMatrix(DickeSector(4), np.zeros((5, 5))))
    assert table.bands == {}
    assert np.max(np.abs(table.reconstruct().mat)) == 0.0


def test_band_table_rejects_odd_offset_content():
    mat = np.zeros((5, 5), dtype=complex)
    mat[0, 1] = 1j
    mat[1, 0] = -1j
    with pytest.raises(StructureError):
        band_table(OperatorMatrix(DickeSector(4), mat))


def test_first_band_dominates():
    table = band_table(exact_cd(ModelParams(10, 0.0), 0.9, 0.5))
    lead = table.max_abs(1)
    rest = max(table.max_abs(i) for i in range(2, 6))
    assert rest / lead < 1.0


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 20), h=st.floats(0.2, 1.8))
def test_band_table_round_trip(n, h):
    term = exact_cd(ModelParams(n, 0.0), h, 0.5)
    rebuilt = band_table(term).reconstruct()
    assert np.max(np.abs(rebuilt.mat - term.mat)) < 1e-12


def test_truncate_keeps_requested_bands():
    params = ModelParams(8, 0.0)
    term = exact_cd(params, 0.9, 0.5)
    assert np.max(np.abs(truncate(term, 4).mat - term.mat)) < 1e-15
    one = truncate(term, 1)
    table = band_table(one)
    assert set(table.bands) == {1}
    assert np.allclose(table.bands[1], band_table(term).bands[1])
    # a two-particle term has a single band: truncation is the identity
    term2 = exact_cd(ModelParams(2, 0.0), 0.8, 0.5)
    assert np.max(np.abs(truncate(term2, 1).mat - term2.mat)) == 0.0
    with pytest.raises(ValidationError):
        truncate(term, 0)


# --------------------------------------------------------------------------
# harmonic-limit correction

def test_hp_zero_rate():
    term = hp_correction(ModelParams(50, 0.0), 1.25, 0.0)
    assert np.max(np.abs(term.mat)) == 0.0


def test_hp_coefficient_above_transition_chain_rule():
    # frozen: -hdot*(2h-1)/(4N(h-1)(h-gamma)) at gamma=0, h=1.25, hdot=0.5, N=100
    assert hp_coefficient(100, 0.0, 1.25, 0.5) == pytest.approx(-0.006, abs=1e-15)
    # symbolic chain-rule oracle: c = -wdot / (2 N w)
    h, gamma, hdot, n = sympy.symbols("h gamma hdot n", positive=True)
    w = 2 * sympy.sqrt((h - 1) * (h - gamma))
    c = -sympy.diff(w, h) * hdot / (2 * n * w)
    for hv in (1.1, 1.6, 2.4):
        expected = float(c.subs({h: hv, gamma: 0.3, hdot: 0.7, n: 80}))
        assert hp_coefficient(80, 0.3, hv, 0.7) == pytest.approx(expected, rel=1e-12)


def test_hp_coefficient_below_transition():
    # fixed-sign branch: -|hdot| h / (2N(1-h^2)); magnitude equals the
    # frequency chain rule for w = 2 sqrt((1-h^2)(1-gamma))
    assert hp_coefficient(100, 0.0, 0.8, 0.5) == pytest.approx(-1.0 / 180.0, abs=1e-15)
    h, gamma, hdot, n = sympy.symbols("h gamma hdot n", positive=True)
    w = 2 * sympy.sqrt((1 - h**2) * (1 - gamma))
    magnitude = sympy.Abs(sympy.diff(w, h) * hdot / (2 * n * w))
    for hv in (0.3, 0.65, 0.95):
        expected = float(magnitude.subs({h: hv, gamma: 0.4, hdot: 0.7, n: 60}))
        assert hp_coefficient(60, 0.4, hv, 0.7) == pytest.approx(-expected, rel=1e-12)
        # independent of ramp direction below the transition
        assert (hp_coefficient(60, 0.4, hv, -0.7)
                == hp_coefficient(60, 0.4, hv, 0.7))


def test_hp_correction_matrix_shape():
    params = ModelParams(40, 0.0)
    term = hp_correction(params, 0.8, 0.5)
    c = hp_coefficient(40, 0.0, 0.8, 0.5)
    assert np.max(np.abs(term.mat - c * sxsy_plus_sysx(40))) < 1e-14
    assert term.matrix.is_hermitian()


def test_hp_rejections():
    params = ModelParams(40, 0.0)
    with pytest.raises(CriticalWindowError):
        hp_correction(params, 1.0005, 0.5)
    with pytest.raises(ValidationError):
        hp_correction(ModelParams(40, 1.2), 0.8, 0.5)
    with pytest.raises(ValidationError):
        hp_correction(params, -0.5, 0.5)
