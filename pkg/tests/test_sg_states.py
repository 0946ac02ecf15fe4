import math
import warnings

import numpy as np
import pytest
from hypothesis import given, seed, settings
from hypothesis import strategies as st

from errors import AllMassRemoved, LowComponentMass, NegativeArgumentWarning, ZeroMeanPhoton
from fock_core import FockVector, fock_distribution, fock_state, make_coherent, mean_photon
from sg_states import (
    Mode,
    SgStateSpec,
    add_photons_ideal,
    apply_A,
    eigen_residual,
    expected_eigen_sign,
    ideal_coherent_state,
    low_component_mass,
    mandel_q,
    mandel_q_coherent_predict,
    mandel_q_shift_predict,
    subtract_photons_ideal,
    subtracted_mean_photon_predict,
)


@pytest.fixture(scope="module")
def coherent_5_big():
    return make_coherent(5.0, 350)


@pytest.fixture(scope="module")
def coherent_12_big():
    return make_coherent(12.0, 350)


def test_mode_sign():
    assert Mode("add").sign == 1
    assert Mode.SUBTRACT.sign == -1


# Estados ideales
def test_add_on_vacuum_gives_phased_fock_state():
    out = add_photons_ideal(fock_state(0, 6), 1)
    esperado = np.zeros(6, dtype=complex)
    esperado[2] = 1j
    assert np.array_equal(out.amps, esperado)


def test_add_zero_times_is_identity(coherent_5):
    assert np.array_equal(add_photons_ideal(coherent_5, 0).amps, coherent_5.amps)


def test_add_rejects_negative_m(coherent_5):
    with pytest.raises(ValueError):
        add_photons_ideal(coherent_5, -1)


@pytest.mark.parametrize("m", [1, 10, 25, 50])
def test_add_mean_shift_alpha_5(coherent_5_big, m):
    assert mean_photon(add_photons_ideal(coherent_5_big, m)) == pytest.approx(25 + 2 * m, abs=1e-8)


def test_add_mean_shift_every_m(coherent_5_big):
    estado = coherent_5_big
    for m in range(1, 51):
        estado = add_photons_ideal(estado, 1)
        assert mean_photon(estado) == pytest.approx(25 + 2 * m, abs=1e-8)


def test_subtract_mean_shift_every_m(coherent_12_big):
    for m in range(1, 51):
        estado, _ = subtract_photons_ideal(coherent_12_big, m)
        assert mean_photon(estado) == pytest.approx(144 - 2 * m, abs=1e-6)


def test_low_component_mass_alpha_12(coherent_12_big):
    analitico = math.exp(-144) * (1 + 144)
    assert low_component_mass(coherent_12_big, 1) == pytest.approx(analitico, rel=1e-8)


def test_subtract_renormalizes_low_mass():
    psi = FockVector.from_amplitudes([1.0, 0.0, 1.0, 0.0, 0.0])
    estado, masa_baja = subtract_photons_ideal(psi, 1)
    assert masa_baja == pytest.approx(0.5)
    assert estado.norm() == pytest.approx(1.0)
    assert fock_distribution(estado)[0] == pytest.approx(1.0)


def test_subtract_all_mass_removed():
    with pytest.raises(AllMassRemoved):
        subtract_photons_ideal(fock_state(1, 5), 1)


def test_subtracted_mean_predict_matches_when_low_mass_negligible(coherent_12_big):
    estado, _ = subtract_photons_ideal(coherent_12_big, 3)
    assert subtracted_mean_photon_predict(coherent_12_big, 3) == pytest.approx(mean_photon(estado), abs=1e-8)


def test_subtracted_mean_predict_formula_with_low_mass():
    psi = FockVector.from_amplitudes([1.0, 0.0, 1.0, 0.0])
    assert subtracted_mean_photon_predict(psi, 1) == pytest.approx(-1.0)
    estado, _ = subtract_photons_ideal(psi, 1)
    assert mean_photon(estado) == pytest.approx(0.0)


@seed(11)
@settings(deadline=None, max_examples=20)
@given(
    m=st.integers(min_value=0, max_value=6),
    semilla=st.integers(min_value=0, max_value=2**32 - 1),
)
def test_add_preserves_shape_exactly(m, semilla):
    rng = np.random.default_rng(semilla)
    dim = 30
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    amps[dim - 2 * m :] = 0.0
    psi = FockVector.from_amplitudes(amps)
    p_antes = fock_distribution(psi)
    p_despues = fock_distribution(add_photons_ideal(psi, m))
    assert np.array_equal(p_despues[2 * m :], p_antes[: dim - 2 * m])
    assert np.all(p_despues[: 2 * m] == 0)


# Operadores no lineales
@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_eigen_residual_add(m):
    residuo = eigen_residual(5.0, m, Mode.ADD, 350)
    assert residuo.best <= 1e-6
    assert residuo.verified_sign == expected_eigen_sign(m)


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5])
def test_eigen_residual_subtract(m):
    residuo = eigen_residual(12.0, m, Mode.SUBTRACT, 350)
    assert residuo.best <= 1e-6
    assert residuo.verified_sign == expected_eigen_sign(m)


def test_eigen_residual_complex_alpha():
    residuo = eigen_residual(3.0 + 2.0j, 1, Mode.ADD, 200)
    assert residuo.minus_alpha <= 1e-6


def test_ideal_coherent_subtract_rejects_small_alpha():
    with pytest.raises(LowComponentMass):
        ideal_coherent_state(1.0, 2, Mode.SUBTRACT, 40)


def test_apply_A_warns_on_negative_argument():
    psi = FockVector.from_amplitudes(np.ones(10))
    with pytest.warns(NegativeArgumentWarning, match="anulo"):
        out = apply_A(psi, 2, Mode.ADD)
    assert np.all(out.amps[:3] == 0)


def test_apply_A_add_annihilates_two_photon_fock_state():
    # m=1 al agregar: el factor en n=1 es sqrt(0/2)
    out = apply_A(fock_state(2, 6), 1, Mode.ADD)
    assert np.all(out.amps == 0)


def test_apply_A_subtract_factor_on_one_photon():
    out = apply_A(fock_state(1, 6), 1, Mode.SUBTRACT)
    assert out.amps[0] == pytest.approx(math.sqrt(3))
    assert np.all(out.amps[1:] == 0)


def test_apply_A_on_added_state_is_silent(coherent_5_big):
    estado = add_photons_ideal(coherent_5_big, 2)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        apply_A(estado, 2, Mode.ADD)


# Estadística
def test_mandel_q_coherent_is_zero(coherent_5):
    assert mandel_q(coherent_5) == pytest.approx(0.0, abs=1e-9)


def test_mandel_q_vacuum_raises():
    with pytest.raises(ZeroMeanPhoton):
        mandel_q(fock_state(0, 4))


def test_mandel_q_fock_state():
    assert mandel_q(fock_state(3, 6)) == pytest.approx(-1.0)


def test_mandel_q_added_alpha_5(coherent_5_big):
    q = mandel_q(add_photons_ideal(coherent_5_big, 1))
    assert q == pytest.approx(-2 / 27, abs=1e-8)
    assert mandel_q_coherent_predict(5.0, 1, Mode.ADD) == pytest.approx(-2 / 27)


def test_mandel_q_subtracted_alpha_12(coherent_12_big):
    estado, _ = subtract_photons_ideal(coherent_12_big, 1)
    assert mandel_q(estado) == pytest.approx(2 / 142, abs=1e-8)
    assert mandel_q_coherent_predict(12.0, 1, Mode.SUBTRACT) == pytest.approx(2 / 142)


def test_mandel_q_signs_for_every_m(coherent_5_big, coherent_12_big):
    for m in range(1, 51):
        assert mandel_q(add_photons_ideal(coherent_5_big, m)) < 0
        estado, _ = subtract_photons_ideal(coherent_12_big, m)
        assert mandel_q(estado) > 0
        if low_component_mass(coherent_12_big, m) <= 1e-12:
            assert mandel_q(estado) == pytest.approx(mandel_q_coherent_predict(12.0, m, Mode.SUBTRACT), abs=1e-6)


def test_mandel_q_shift_predict_matches_coherent_formula():
    assert mandel_q_shift_predict(0.0, 25.0, 3, Mode.ADD) == pytest.approx(mandel_q_coherent_predict(5.0, 3, "add"))
    with pytest.raises(ZeroMeanPhoton):
        mandel_q_shift_predict(0.0, 4.0, 2, Mode.SUBTRACT)


# Especificación del estado ideal
def test_sg_state_spec_builds_both_modes(coherent_12_big):
    agregado = SgStateSpec(coherent_12_big, 2, "add")
    restado = SgStateSpec(coherent_12_big, 2, Mode.SUBTRACT)
    assert agregado.mode is Mode.ADD
    assert agregado.low_mass() == 0.0
    assert not restado.needs_renormalization()
    assert mean_photon(agregado.build()) == pytest.approx(148.0, abs=1e-8)
    assert mean_photon(restado.build()) == pytest.approx(140.0, abs=1e-8)


def test_sg_state_spec_flags_low_mass():
    spec = SgStateSpec(make_coherent(1.0, 30), 1, Mode.SUBTRACT)
    assert spec.needs_renormalization()
    with pytest.raises(ValueError):
        SgStateSpec(make_coherent(1.0, 30), -2, Mode.ADD)


@pytest.mark.parametrize("m", [1, 5, 20])
def test_subtract_then_add_recovers_state(coherent_12_big, m):
    restado, _ = subtract_photons_ideal(coherent_12_big, m)
    recuperado = add_photons_ideal(restado, m)
    assert abs(recuperado.overlap(coherent_12_big)) >= 1 - 1e-8


@pytest.mark.parametrize("m", [1, 3, 10])
def test_shift_predict_matches_measured_q(rng, m):
    dim = 60
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    amps[dim - 2 * m :] = 0.0
    psi = FockVector.from_amplitudes(amps)
    predicho = mandel_q_shift_predict(mandel_q(psi), mean_photon(psi), m, Mode.ADD)
    assert mandel_q(add_photons_ideal(psi, m)) == pytest.approx(predicho, abs=1e-8)
