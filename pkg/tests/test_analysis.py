import numpy as np
import pytest

from spinbell.analysis import (
    BellResult,
    BellSettings,
    analyze_raw_table,
    bell_s,
    bell_s_batch,
    bell_s_state,
    chi_ramp_trace,
    closed_form_s,
    correlation_m,
    find_peaks,
    sample_separable_bound,
    synthetic_rows,
    trace_peaks,
    visibility,
)
from spinbell.core import MeasurementSetting, SeparableSpec, make_separable, random_states
from spinbell.optics import DetectorRecord, measure_intensities, prepare_mns
from spinbell.tables import TableError, parse_raw_table

SQRT2 = np.sqrt(2)
TABLE2 = [
    ("s11", 7.99, 10.4, 41.6, 38.4),
    ("s12", 13.6, 10.4, 30.8, 43.6),
    ("s21", 36.4, 40.4, 10.8, 12.8),
    ("s22", 13.2, 11.6, 29.6, 45.2),
]


def product_grid_supremum(n=181):
    """Oracle: max |S| over real product states on an angle grid."""
    th = np.linspace(0, np.pi, n)
    t = np.stack([np.cos(th), np.sin(th)], axis=1)
    states = np.einsum("ai,bj->abij", t, t).reshape(-1, 4)
    return float(np.abs(bell_s_batch(states)).max())


def test_canonical_settings():
    c = BellSettings.canonical()
    assert c.s11.alpha == pytest.approx(np.pi / 16)
    assert c.s21.alpha == pytest.approx(3 * np.pi / 16)
    assert c.s11.beta == 0
    assert c.s22.beta == pytest.approx(np.pi / 8)


def test_correlation_m_published_rows():
    assert correlation_m(DetectorRecord(7.99, 10.4, 41.6, 38.4)) == pytest.approx(0.626, abs=1e-3)
    assert correlation_m(DetectorRecord(36.4, 40.4, 10.8, 12.8)) == pytest.approx(-0.530, abs=1e-3)
    assert correlation_m(DetectorRecord(0, 0, 0.5, 0.5)) == 1


def test_correlation_m_zero_total():
    with pytest.raises(ValueError, match="zero total"):
        correlation_m(DetectorRecord(0, 0, 0, 0))


def test_bell_result_sum_is_exact():
    r = BellResult.from_m(0.1, 0.2, -0.3, 0.4)
    assert r.s == 0.1 + 0.2 - (-0.3) + 0.4


def test_bell_s_maximal():
    r = bell_s(0, 0)
    assert r.s == pytest.approx(2 * SQRT2, abs=1e-12)
    # M = cos(4(alpha - beta)) at phi = chi = 0
    np.testing.assert_allclose(r.m, [1 / SQRT2, 1 / SQRT2, -1 / SQRT2, 1 / SQRT2], atol=1e-12)


def test_bell_s_phi_pi_vanishes():
    assert bell_s(np.pi, 0).s == pytest.approx(0, abs=1e-12)


def test_closed_form_examples():
    assert closed_form_s(0, 0) == pytest.approx(2 * SQRT2)
    assert closed_form_s(np.pi / 2, 1.3) == pytest.approx(0, abs=1e-15)
    assert closed_form_s(np.pi / 5, np.pi / 3) == pytest.approx(1.7161842084530532, abs=1e-12)
    assert bell_s(np.pi / 3, np.pi / 5).s == pytest.approx(1.7161842084530532, abs=1e-12)


def test_closed_form_grid():
    g = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    worst = max(abs(bell_s(phi, chi).s - closed_form_s(chi, phi)) for chi in g for phi in g)
    assert worst < 1e-9


def test_phase_errors_only_reduce_violation(rng):
    best = bell_s(0, 0).s
    for phi, chi in rng.uniform(1e-3, 2 * np.pi - 1e-3, size=(200, 2)):
        assert bell_s(phi, 0).s < best
        assert bell_s(0, chi).s < best
        assert bell_s(phi, chi).s < best


def test_periodicity(rng):
    for phi, chi in rng.uniform(0, 2 * np.pi, size=(20, 2)):
        s = bell_s(phi, chi).s
        assert bell_s(phi + 2 * np.pi, chi).s == pytest.approx(s, abs=1e-12)
        assert bell_s(phi, chi - 2 * np.pi).s == pytest.approx(s, abs=1e-12)


def test_random_states_respect_tsirelson(rng):
    states = random_states(100_000, rng)
    for chi in (0.0, 0.7):
        assert np.abs(bell_s_batch(states, chi)).max() <= 2 * SQRT2 + 1e-9


def test_batch_agrees_with_element_pipeline(rng):
    states = random_states(30, rng)
    batch = bell_s_batch(states, 0.4)
    for v, s in zip(states, batch):
        assert bell_s_state(v, 0.4).s == pytest.approx(s, abs=1e-12)


def test_batch_m_bounded(rng):
    states = random_states(10_000, rng)
    s11 = BellSettings(*[MeasurementSetting(0.3, 0.1)] * 4)
    # all four settings equal: S = 2 M
    assert np.abs(bell_s_batch(states, 0, s11)).max() <= 2 + 1e-12


def test_separable_vv_example():
    r = bell_s_state(make_separable(SeparableSpec(1, 0, 1, 0)))
    np.testing.assert_allclose(r.m, [1 / SQRT2, 0, -1 / SQRT2, 0], atol=1e-12)
    assert r.s == pytest.approx(SQRT2, abs=1e-12)


def test_separable_sampler_never_violates():
    best, violations = sample_separable_bound(100_000, seed=7)
    assert violations == 0
    assert best <= 2 + 1e-9


def test_separable_sampler_reaches_grid_supremum():
    # at the fixed canonical settings product states top out at sqrt(2), not 2
    sup = product_grid_supremum()
    assert sup == pytest.approx(SQRT2, abs=1e-9)
    best, _ = sample_separable_bound(100_000, seed=7)
    assert sup - 5e-3 < best <= sup + 1e-12


def test_separable_sampler_deterministic():
    assert sample_separable_bound(5000, seed=3) == sample_separable_bound(5000, seed=3)
    with pytest.raises(ValueError):
        sample_separable_bound(0, seed=3)


def test_chi_ramp_trace():
    s = BellSettings.canonical().s11
    trace = chi_ramp_trace(0.0, s, 512)
    chis = np.array([c for c, _ in trace])
    assert chis[0] == 0 and chis[-1] < 4 * np.pi
    even = np.array([r.i3 + r.i4 for _, r in trace])
    amps = measure_intensities(0, s, 0)
    oracle = np.cos(chis / 2) ** 2 * (amps.i3 + amps.i4) + np.sin(chis / 2) ** 2 * (amps.i1 + amps.i2)
    np.testing.assert_allclose(even, oracle, atol=1e-14)
    peaks = trace_peaks(trace)
    np.testing.assert_allclose(chis[peaks], [0, 2 * np.pi], atol=1e-12)


def test_chi_ramp_swap_at_pi():
    s = BellSettings.canonical().s12
    r0 = measure_intensities(0.3, s, 0)
    rp = measure_intensities(0.3, s, np.pi)
    np.testing.assert_allclose([rp.i1, rp.i2, rp.i3, rp.i4], [r0.i4, r0.i3, r0.i2, r0.i1], atol=1e-15)


def test_visibility_max_at_phi_zero():
    s = BellSettings.canonical().s12
    vis = lambda phi: visibility([r.i3 for _, r in chi_ramp_trace(phi, s, 256)])
    v0 = vis(0.0)
    for phi in np.linspace(0.2, 2 * np.pi - 0.2, 12):
        assert vis(phi) < v0


def test_chi_ramp_needs_two_samples():
    with pytest.raises(ValueError):
        chi_ramp_trace(0, BellSettings.canonical().s11, 1)


def test_find_peaks_window():
    assert list(find_peaks([0, 1, 0, 2, 0], periodic=False)) == [1, 3]
    assert list(find_peaks([3, 1, 0, 2, 1])) == [0, 3]


def test_analyze_table2():
    r = analyze_raw_table(TABLE2)
    np.testing.assert_allclose(r.m, [0.626, 0.512, -0.530, 0.502], atol=1e-3)
    assert r.s == pytest.approx(2.17, abs=5e-3)
    assert r.violates


def test_analyze_row_order_and_labels():
    shuffled = [("(a2, b2)",) + TABLE2[3][1:], ("a1b1",) + TABLE2[0][1:],
                ("S21",) + TABLE2[2][1:], ("s12",) + TABLE2[1][1:]]
    assert analyze_raw_table(shuffled) == analyze_raw_table(TABLE2)


def test_analyze_errors():
    with pytest.raises(ValueError, match="missing basis"):
        analyze_raw_table(TABLE2[:3])
    with pytest.raises(ValueError, match="non-negative"):
        analyze_raw_table(TABLE2[:3] + [("s22", -1, 0, 0, 2)])
    with pytest.raises(ValueError, match="unknown basis"):
        analyze_raw_table(TABLE2[:3] + [("foo", 1, 1, 1, 1)])


def test_ideal_round_trip():
    rows = [(k, *measure_intensities(0, s, 0).as_tuple())
            for k, s in BellSettings.canonical().items()]
    assert analyze_raw_table(rows).s == pytest.approx(2 * SQRT2, abs=1e-9)


def test_synthetic_rows_reproduce_m():
    m = [0.47, 0.0, -0.56, 0.0]
    r = analyze_raw_table(synthetic_rows(m))
    np.testing.assert_allclose(r.m, m, atol=1e-15)
    assert r.s == pytest.approx(1.03, abs=1e-12)


def test_parse_raw_table_decimal_commas():
    text = "basis;i1;i2;i3;i4\ns11;7,99;10,4;41,6;38,4\n"
    assert parse_raw_table(text) == [("s11", 7.99, 10.4, 41.6, 38.4)]
    text = 'basis,i1,i2,i3,i4\ns11,"7,99","10,4","41,6","38,4"\n'
    assert parse_raw_table(text) == [("s11", 7.99, 10.4, 41.6, 38.4)]


def test_parse_raw_table_errors():
    with pytest.raises(TableError, match="line 3"):
        parse_raw_table("basis,i1,i2,i3,i4\ns11,1,2,3,4\ns12,1,2,x,4\n")
    with pytest.raises(TableError, match="line 2: expected 5 fields"):
        parse_raw_table("basis,i1,i2,i3,i4\ns11,1,2,3\n")
    with pytest.raises(TableError, match="header"):
        parse_raw_table("a,b\n")
