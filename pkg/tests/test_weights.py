"""Weight sequences: generators, energy cache, and assumption checks."""
import numpy as np
import pytest

from fractalwalk import WeightSequence, growth_report, validate_assumptions


def test_partial_energy_constant():
    assert WeightSequence.constant().partial_energy(5) == 5.0


def test_partial_energy_linear():
    # 1 + 4 + 9
    assert WeightSequence.power(1.0).partial_energy(3) == 14.0


def test_partial_energy_odd_indicator():
    seq = WeightSequence.odd_indicator()
    assert seq.values(4).tolist() == [1.0, 0.0, 1.0, 0.0]
    assert seq.partial_energy(4) == 2.0


def test_partial_energy_empty_prefix():
    assert WeightSequence.constant().partial_energy(0) == 0.0


def test_energies_match_cumsum():
    rng = np.random.default_rng(3)
    a = rng.uniform(-2.0, 2.0, 50)
    seq = WeightSequence.explicit(a)
    np.testing.assert_allclose(seq.energies(50), np.cumsum(a**2), rtol=1e-13)


def test_values_cache_is_read_only():
    seq = WeightSequence.constant()
    v = seq.values(10)
    with pytest.raises(ValueError):
        v[0] = 7.0
    # a longer request must not disturb earlier reads
    w = seq.values(100)
    np.testing.assert_array_equal(w[:10], v)


def test_explicit_zero_extension():
    seq = WeightSequence.explicit([1.0, 2.0])
    assert seq.length == 2
    # indices past the stored block are zero weights, not an error
    assert seq.values(4).tolist() == [1.0, 2.0, 0.0, 0.0]
    assert seq.partial_energy(100) == 5.0


def test_single_weight_accessor():
    assert WeightSequence.power(2.0).a(3) == 9.0


def test_from_spec_round_trip():
    for seq in (
        WeightSequence.constant(),
        WeightSequence.power(0.5),
        WeightSequence.alternating(),
        WeightSequence.odd_indicator(),
        WeightSequence.geometric(0.5),
        WeightSequence.explicit([1.0, 0.0, 2.0]),
    ):
        clone = WeightSequence.from_spec(seq.spec)
        assert clone.spec == seq.spec
        np.testing.assert_array_equal(clone.values(3), seq.values(3))


def test_validate_constant_unit_ratio():
    # a_n^2 / A_n^0 == 1 everywhere, so the certified constant is exactly 1
    rep = validate_assumptions(WeightSequence.constant(), delta=1.0, n_max=100)
    assert rep.passed
    assert rep.k_hat == 1.0


def test_validate_geometric_growth_fails():
    rep = validate_assumptions(WeightSequence.geometric(2.0), delta=0.5, n_max=60)
    assert not rep.passed


def test_validate_linear_weights_pass():
    # a_n^2 = n^2 against A_n^{2/3} ~ (n^3/3)^{2/3}: bounded ratio
    rep = validate_assumptions(WeightSequence.power(1.0), delta=1.0 / 3.0, n_max=10_000)
    assert rep.passed
    assert np.isfinite(rep.k_hat)


def test_k_hat_dominates_every_ratio():
    seq = WeightSequence.power(1.0)
    delta = 1.0 / 3.0
    rep = validate_assumptions(seq, delta, n_max=500)
    a = seq.values(500)
    energies = seq.energies(500)
    ratios = a**2 / energies ** (1.0 - delta)
    assert rep.k_hat >= ratios.max() - 1e-12


def test_growth_constant_weights():
    rep = growth_report(WeightSequence.constant(), delta=1.0, q=2.0, n0=1, n_max=100)
    assert rep.passed
    assert rep.poly_sup == pytest.approx(1.0)


def test_growth_linear_weights():
    rep = growth_report(WeightSequence.power(1.0), delta=1.0 / 3.0, q=2.0, n_max=1000)
    assert rep.passed


def test_growth_geometric_base_two_vs_q_three():
    # A_{n+1}/A_n -> 4 > 3, so the energy outruns q^n and the polynomial
    # envelope alike; both verdicts must come back negative.
    rep = growth_report(WeightSequence.geometric(2.0), delta=1.0, q=3.0, n_max=40)
    assert not rep.exp_ok
    assert not rep.poly_bounded
    assert not rep.passed


def test_growth_geometric_within_budget():
    # same weights against q=5 > 4: exponential envelope holds
    rep = growth_report(WeightSequence.geometric(2.0), delta=1.0, q=5.0, n_max=40)
    assert rep.exp_ok
