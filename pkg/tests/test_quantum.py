import math

import numpy as np
import pytest

from spinbell.analysis import BellSettings, bell_s, bell_s_state, closed_form_s
from spinbell.quantum import (
    PostSelectedState,
    coherent_mns,
    post_select_single_photon,
    post_selected_concurrence,
    quantum_chsh,
    verify_factorization,
)


def operator_expansion(amp, levels):
    """Oracle: exp(-|amp|^2/2) sum_n (amp a+_MNS)^n/n! |0> by repeated matrix application
    on a two-mode space truncated at ``levels`` photons per mode."""
    a_dag = np.diag(np.sqrt(np.arange(1, levels + 1)), -1).astype(complex)
    eye = np.eye(levels + 1)
    a_mns = (np.kron(a_dag, eye) + np.kron(eye, a_dag)) / math.sqrt(2)
    term = np.zeros((levels + 1) ** 2, dtype=complex)
    term[0] = 1
    psi = np.zeros_like(term)
    for n in range(levels + 1):
        psi += term
        term = amp * (a_mns @ term) / (n + 1)
    return math.exp(-abs(amp) ** 2 / 2) * psi.reshape(levels + 1, levels + 1)


def test_vacuum():
    exp = coherent_mns(0, 10)
    assert exp.coeff(0, 0) == 1
    assert exp.total_probability() == 1


def test_single_photon_coefficients():
    exp = coherent_mns(1, 20)
    assert exp.coeff(1, 0) == pytest.approx(0.4288819424803534, abs=1e-15)
    assert exp.coeff(0, 1) == pytest.approx(0.4288819424803534, abs=1e-15)
    assert exp.coeff(1, 1) == pytest.approx(0.30326532985631666, abs=1e-15)
    assert exp.coeff(2, 0) == pytest.approx(0.2144409712401767, abs=1e-15)


@pytest.mark.parametrize("amp", [1.0, 0.5j, 1.5 * np.exp(0.7j)])
def test_matches_operator_oracle(amp):
    cutoff = 12
    oracle = operator_expansion(amp, cutoff)
    exp = coherent_mns(amp, cutoff)
    for q, m, c in exp.rows():
        assert c == pytest.approx(oracle[q, m], abs=1e-13)


def test_captured_probability():
    exp = coherent_mns(1, 20)
    # Poisson(1) tail beyond n = 20 is below 1/21! * e^{-1} * 2
    assert 1 - exp.total_probability() < 2 * math.exp(-1) / math.factorial(21) + 1e-15
    assert exp.total_probability() == pytest.approx(1, abs=1e-12)


def test_number_distribution_is_poisson():
    amp = 1.7 * np.exp(0.3j)
    pn = coherent_mns(amp, 30).number_distribution()
    mu = abs(amp) ** 2
    poisson = np.array([math.exp(-mu) * mu**n / math.factorial(n) for n in range(31)])
    np.testing.assert_allclose(pn, poisson, atol=1e-12)


def test_factorization():
    assert verify_factorization(1, 20) < 1e-12
    assert verify_factorization(2 * np.exp(1j * np.pi / 3), 30) < 1e-12
    assert verify_factorization(0, 30) == 0


def test_factorization_grid():
    for r in np.linspace(0, 3, 7):
        for t in np.linspace(0, 2 * np.pi, 5):
            assert verify_factorization(r * np.exp(1j * t), 30) < 1e-12


def test_post_selection_amp_one():
    ps = post_select_single_photon(coherent_mns(1, 20))
    c = coherent_mns(1, 20)
    assert ps.probability == pytest.approx(abs(c.coeff(1, 0)) ** 2 + abs(c.coeff(0, 1)) ** 2, abs=1e-15)
    assert ps.probability == pytest.approx(0.36787944117144233, abs=1e-12)
    assert ps.c_hh == pytest.approx(1 / math.sqrt(2))
    assert ps.c_vv == pytest.approx(1 / math.sqrt(2))


def test_post_selection_keeps_global_phase():
    ps = post_select_single_photon(coherent_mns(2j, 30))
    assert ps.c_hh == pytest.approx(1j / math.sqrt(2))
    assert post_selected_concurrence(ps) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("amp", [0.1, 1, 2.5 * np.exp(2j)])
def test_post_selection_properties(amp):
    ps = post_select_single_photon(coherent_mns(amp, 30))
    assert ps.probability == pytest.approx(abs(amp) ** 2 * math.exp(-abs(amp) ** 2), abs=1e-12)
    assert post_selected_concurrence(ps) == pytest.approx(1, abs=1e-12)


def test_post_selection_vacuum_fails():
    with pytest.raises(ValueError):
        post_select_single_photon(coherent_mns(0, 10))


def test_quantum_chsh_matches_classical():
    ps = post_select_single_photon(coherent_mns(1, 30))
    s = quantum_chsh(ps)
    assert s == pytest.approx(closed_form_s(0, 0), abs=1e-12)
    assert s == pytest.approx(bell_s(0, 0).s, abs=1e-12)


def test_quantum_chsh_degenerate_settings():
    ps = post_select_single_photon(coherent_mns(1, 30))
    degenerate = BellSettings.from_angles(np.pi / 16, np.pi / 16, 0, np.pi / 8)
    assert abs(quantum_chsh(ps, degenerate)) <= 2 + 1e-12


def test_quantum_chsh_product_state():
    s = quantum_chsh(PostSelectedState(1, 0, 1.0))
    assert abs(s) <= 2
    assert s == pytest.approx(bell_s_state(PostSelectedState(1, 0, 1.0).to_spin_orbit()).s, abs=1e-12)
