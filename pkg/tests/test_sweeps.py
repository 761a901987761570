import numpy as np
import pytest

from ahsp_sim.groups import FiniteAbelianGroup
from ahsp_sim.instances import enumerate_instances
from ahsp_sim.operators import make_canonical_hiding_function
from ahsp_sim.pipelines import (
    b_axes,
    ifqa_exact_distribution_for_z,
    ifqa_expected_distribution,
    ifqa_run_state,
    standard_exact_distribution,
    y_register,
)
from ahsp_sim.rng import make_rng, random_density, random_pure_amplitudes
from ahsp_sim.states import (
    DensityMatrix,
    MixedRadixRegister,
    PureState,
    marginal,
    trace_distance,
)
from ahsp_sim.sweeps import (
    ZAverageEngine,
    expected_distribution_vector,
    standard_distribution_vector,
)


def dist_to_vector(dist, moduli):
    reg = MixedRadixRegister(moduli)
    out = np.zeros(reg.total)
    for coords, p in dist.items():
        out[reg.index(coords)] = p
    return out


def test_expected_vector_examples():
    g = FiniteAbelianGroup((4,))
    v = expected_distribution_vector(g.subgroup((2,)))
    assert np.allclose(v, [0.5, 0, 0.5, 0])
    assert np.allclose(expected_distribution_vector(g.full_subgroup()), [1, 0, 0, 0])
    assert np.allclose(expected_distribution_vector(g.trivial_subgroup()), [0.25] * 4)


def test_standard_vector_matches_simulator():
    for g, h in enumerate_instances(36):
        f = make_canonical_hiding_function(h)
        fast = standard_distribution_vector(f)
        slow = dist_to_vector(standard_exact_distribution(f), g.moduli)
        assert np.max(np.abs(fast - slow)) < 1e-12


def test_engine_average_matches_simulator():
    rng = make_rng(0)
    for g, h in enumerate_instances(24):
        f = make_canonical_hiding_function(h)
        engine = ZAverageEngine(f)
        amps = random_pure_amplitudes(f.y_size, rng)
        phi = PureState(y_register(f), amps)
        fast = engine.averaged_distribution(np.abs(amps) ** 2)
        slow = dist_to_vector(ifqa_expected_distribution(f, phi), g.moduli)
        assert np.max(np.abs(fast - slow)) < 1e-11


def test_engine_mixed_aux_matches_simulator():
    rng = make_rng(1)
    g = FiniteAbelianGroup((2, 4))
    for gens in [(1, 2), (2, 2), (1, 4), (2, 4), (1, 1)]:
        f = make_canonical_hiding_function(g.subgroup(gens))
        rho = DensityMatrix(y_register(f), random_density(f.y_size, rng))
        engine = ZAverageEngine(f)
        fast = engine.averaged_distribution(np.real(np.diag(rho.matrix)))
        slow = dist_to_vector(ifqa_expected_distribution(f, rho), g.moduli)
        assert np.max(np.abs(fast - slow)) < 1e-11


def test_engine_z_zero_matches_simulator():
    rng = make_rng(2)
    for g, h in enumerate_instances(20):
        f = make_canonical_hiding_function(h)
        engine = ZAverageEngine(f)
        amps = random_pure_amplitudes(f.y_size, rng)
        phi = PureState(y_register(f), amps)
        fast = engine.z_zero_distribution(np.abs(amps) ** 2)
        z0 = (0,) * g.rank
        slow = dist_to_vector(ifqa_exact_distribution_for_z(f, phi, z0), g.moduli)
        assert np.max(np.abs(fast - slow)) < 1e-11


def test_engine_restoration_bound_dominates_true_distance():
    rng = make_rng(3)
    for g, h in enumerate_instances(16):
        f = make_canonical_hiding_function(h)
        engine = ZAverageEngine(f)
        bound = engine.restoration_trace_bound()
        assert bound < 1e-9
        amps = random_pure_amplitudes(f.y_size, rng)
        phi = PureState(y_register(f), amps)
        for z in f.y_elements():
            state = ifqa_run_state(f, phi, z)
            true = trace_distance(marginal(state, b_axes(f)), phi)
            # both are at noise level; the certificate must not be beaten
            # by more than numerical slack
            assert true < max(bound, 1e-12) * 10 + 1e-12


def test_engine_rejects_uneven_function_table():
    g = FiniteAbelianGroup((4,))
    h = g.subgroup((2,))
    f = make_canonical_hiding_function(h)
    f.table[(1,)] = (0,)  # breaks the even-fiber property
    with pytest.raises(ValueError):
        ZAverageEngine(f)


def test_engine_weight_shape_check():
    f = make_canonical_hiding_function(FiniteAbelianGroup((4,)).subgroup((2,)))
    engine = ZAverageEngine(f)
    with pytest.raises(ValueError):
        engine.averaged_distribution([1.0, 0.0, 0.0])


def test_engine_distributions_normalized():
    for g, h in enumerate_instances(30):
        f = make_canonical_hiding_function(h)
        engine = ZAverageEngine(f)
        w = np.zeros(f.y_size)
        w[0] = 1.0
        assert engine.averaged_distribution(w).sum() == pytest.approx(1.0, abs=1e-9)
        assert standard_distribution_vector(f).sum() == pytest.approx(1.0, abs=1e-9)
