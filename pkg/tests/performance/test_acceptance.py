"""
Acceptance checks at full horizon
=================================

The quantitative examples the lab is judged by: closed-form Bowen limits,
the one-step contraction bound on every system family, equidistribution and
bifurcation probes on the circle, the block point on the shift, the
Anosov-Katok stage and the transport oracle suite. Horizons and sample sizes
are the published ones, so this module is slow.
"""

import math

import numpy as np
import pytest

from src.diagnostics import (
    bifurcation_probe,
    delta_e_estimate,
    divergence_curve,
    geometric_schedule,
    meta_gap_curve,
    oscillation_score,
)
from src.empirics import (
    arc_uniform_target,
    dirac_target,
    empirical_measure,
    meta_empirical,
    uniform_measure,
)
from src.phase_space import PhaseSpace, diameter
from src.systems import (
    BowenParams,
    OrbitBudget,
    SystemSpec,
    ak_map,
    band_occupancy,
    bowen_running_averages,
    build_bump_diffeo,
    commutation_residual,
    lift_diffeo,
    orbit_array,
    verify_sublemma,
)
from src.systems.symbolic import block_end_frequencies
from src.transport import (
    EmpiricalMeasure,
    MetaMeasure,
    lifted_w1,
    matched_l1,
    w1,
    w1_discrete,
    w1_entropic,
    w1_interval,
)
from src.transport.oracles import cdf_integral_w1, vertex_enumeration_w1

GOLDEN = (5 ** 0.5 - 1) / 2
BLOCKS = [10 ** i for i in range(1, 7)]


def _probability(rng, size):
    w = rng.random(size) + 0.05
    return w / w.sum()


def _consecutive_gaps(spec, x0, n_max):
    """w1(e_n, e_(n+1)) for n = 1..n_max along one orbit"""
    points = orbit_array(spec, x0, OrbitBudget.for_system(spec, n_max + 1))
    previous = EmpiricalMeasure.from_orbit(spec.space, points[:1])
    gaps = []
    for n in range(1, n_max + 1):
        current = EmpiricalMeasure.from_orbit(spec.space, points[:n + 1])
        gaps.append((n, w1(previous, current)))
        previous = current
    return gaps


@pytest.mark.performance
@pytest.mark.slow
class TestBowenAcceptance:
    """Closed-form limits against the passage simulation"""

    def test_gaunersdorfer_window(self, gaunersdorfer_params):
        window = [r.average for r in bowen_running_averages(gaunersdorfer_params, 0.1, 60)[29:60]]
        assert abs(max(window) - gaunersdorfer_params.upper_average) <= 0.02
        assert abs(min(window) - gaunersdorfer_params.lower_average) <= 0.02

    def test_degenerate_cycle_settles(self):
        params = BowenParams(alpha_plus=2.0, alpha_minus=1.0, beta_plus=1.0, beta_minus=2.0)
        assert not params.non_degenerate
        window = [r.average for r in bowen_running_averages(params, 0.1, 60)[29:60]]
        assert max(window) - min(window) <= 0.02


@pytest.mark.performance
@pytest.mark.slow
class TestContractionAcceptance:
    """w1(e_n, e_(n+1)) <= diameter/(n+1) on every family"""

    @pytest.mark.parametrize("spec, starts, n_max", [
        (SystemSpec.logistic(4.0), [0.1234, math.sin(math.pi / 7.0) ** 2], 10_000),
        (SystemSpec.rotation(GOLDEN), [0.0, 0.377], 10_000),
        (SystemSpec.expanding_times(3), [0.1234, 0.61], 10_000),
        (SystemSpec.shift_on_blocks([3, 9, 27, 81, 243, 729, 2187, 6561], depth=8), [None], 10_000),
    ])
    def test_pointwise_bound(self, spec, starts, n_max):
        bound = diameter(spec.space)
        violations = [
            (x0, n, gap)
            for x0 in starts
            for n, gap in _consecutive_gaps(spec, x0, n_max)
            if gap > bound / (n + 1) + 1e-12
        ]
        assert violations == []

    def test_pointwise_bound_on_annulus(self):
        # exact solves on the annulus are dense, so the horizon is shorter
        g = lift_diffeo(build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9), 2)
        spec = ak_map(None, g, GOLDEN)
        bound = diameter(spec.space)
        for n, gap in _consecutive_gaps(spec, (0.5, 0.25), 150):
            assert gap <= bound / (n + 1) + 1e-12

    @pytest.mark.parametrize("spec", [
        SystemSpec.logistic(4.0),
        SystemSpec.rotation(GOLDEN),
        SystemSpec.expanding_times(3),
    ])
    def test_lifted_bound(self, spec):
        sample = list(np.random.default_rng(3).random(40))
        records = meta_gap_curve(spec, sample, [1, 10, 100, 1000], mesh=1.0 / 4096)
        assert all(r.within_bound and r.ordered for r in records)


@pytest.mark.performance
@pytest.mark.slow
class TestCircleAcceptance:
    """Equidistribution, bifurcation and pushforward probes on the circle"""

    @pytest.fixture
    def sample(self):
        return list(np.random.default_rng(2024).random(200))

    def test_rotation_equidistribution(self):
        spec = SystemSpec.rotation(GOLDEN)
        grid = uniform_measure(PhaseSpace.circle(), 2048)
        starts = np.random.default_rng(17).random(20)
        for n in (10 ** 2, 10 ** 3, 10 ** 4, 10 ** 5):
            worst = max(w1(empirical_measure(spec, float(x), n), grid) for x in starts)
            assert worst <= 3.0 / n + 1.0 / 4096

    def test_bifurcation_to_half_arcs(self, sample):
        k = 1000
        target = arc_uniform_target(sample, 0.5)
        (distance,) = bifurcation_probe([SystemSpec.rotation(1.0 / k)], [k // 2], target, sample,
                                        mesh=1.0 / 4096)
        assert distance <= 0.02

    def test_pushforward_of_ergodic_rotation(self, sample):
        meta = meta_empirical(SystemSpec.rotation(GOLDEN), sample, 10 ** 4)
        target = dirac_target(uniform_measure(PhaseSpace.circle(), 2048))
        assert lifted_w1(meta, target, mesh=1.0 / 4096) <= 0.05

    def test_identity_against_golden_rotation(self, sample):
        estimate = delta_e_estimate(SystemSpec.identity(), SystemSpec.rotation(GOLDEN),
                                    10 ** 3, 10 ** 5, sample, mesh=1.0 / 4096)
        assert estimate.value == pytest.approx(0.25, abs=0.02)

    def test_identity_self_divergence(self, sample):
        spec = SystemSpec.identity()
        assert delta_e_estimate(spec, spec, 10 ** 3, 10 ** 5, sample[:50]).value == 0.0

    def test_curves_nonincreasing(self, sample):
        spec = SystemSpec.logistic(3.9)
        curve = divergence_curve(spec, spec, [100, 300, 1000, 3000], 10 ** 4, sample[:40],
                                 mesh=1.0 / 4096)
        assert curve.is_nonincreasing()


@pytest.mark.performance
@pytest.mark.slow
class TestSymbolicAcceptance:
    """The block point with blocks 10^i"""

    def test_block_end_frequencies_alternate(self):
        frequencies = block_end_frequencies(BLOCKS)
        assert all(f <= 0.06 for f in frequencies[0::2])
        assert all(f >= 0.43 for f in frequencies[1::2])

    def test_oscillation_on_first_symbol(self):
        spec = SystemSpec.shift_on_blocks(BLOCKS, depth=1)
        report = oscillation_score(spec, None, 100, 1_200_000,
                                   schedule=geometric_schedule(100, 1_200_000, 1.2))
        assert report.score >= 0.35


@pytest.mark.performance
@pytest.mark.slow
class TestAnosovKatokAcceptance:
    """The bump diffeomorphism and its conjugated rotation"""

    @pytest.fixture
    def g_hat(self):
        return build_bump_diffeo(0.1, 0.9, 0.05, 0.05, 0.9)

    def test_sublemma_margins(self, g_hat):
        report = verify_sublemma(g_hat, 0.1, 0.9, 0.05, 0.05, 0.9, grid_n=200)
        assert report.passed
        assert min(report.identity_margin, report.area_margin, report.squeeze_margin) > 0.0

    def test_lift_commutes(self, g_hat):
        assert commutation_residual(lift_diffeo(g_hat, 2), 1, 2, grid_n=200) <= 1e-9

    def test_band_occupancy(self, g_hat):
        spec = ak_map(None, lift_diffeo(g_hat, 2), GOLDEN)
        assert band_occupancy(spec, (0.5, 0.25), 10 ** 5, 0.05, q=2) == pytest.approx(0.05, abs=1e-3)


@pytest.mark.performance
@pytest.mark.slow
class TestTransportOracleSuite:
    """Solvers against independent oracles at the published counts"""

    def test_interval_against_cdf(self, rng, interval):
        for _ in range(100):
            m, n = rng.integers(1, 30, size=2)
            x, y = rng.random(m), rng.random(n)
            wx, wy = _probability(rng, m), _probability(rng, n)
            mu = EmpiricalMeasure.from_atoms(interval, x.tolist(), wx.tolist())
            nu = EmpiricalMeasure.from_atoms(interval, y.tolist(), wy.tolist())
            assert abs(w1_interval(mu, nu) - cdf_integral_w1(x, wx, y, wy)) <= 1e-12

    def test_discrete_against_vertices(self, rng):
        for _ in range(50):
            m, n = rng.integers(1, 5, size=2)
            cost = rng.random((m, n))
            a, b = _probability(rng, m), _probability(rng, n)
            assert abs(w1_discrete(cost, a, b)[0] - vertex_enumeration_w1(cost, a, b)) <= 1e-9

    def test_entropic_bracket(self, rng):
        for _ in range(20):
            cost = rng.random((12, 9))
            a, b = _probability(rng, 12), _probability(rng, 9)
            exact, _ = w1_discrete(cost, a, b)
            bracket = w1_entropic(cost, a, b, epsilon=5e-3)
            assert bracket.lower - 1e-9 <= exact <= bracket.upper + 1e-9

    def test_lifted_isometry_and_matched_bound(self, random_measure, circle):
        for _ in range(20):
            mu, nu = random_measure(circle, 6), random_measure(circle, 4)
            assert lifted_w1(MetaMeasure.dirac(mu), MetaMeasure.dirac(nu)) == pytest.approx(w1(mu, nu), abs=1e-12)
            Ms = [random_measure(circle, 5) for _ in range(6)]
            Ns = [random_measure(circle, 5) for _ in range(6)]
            assert lifted_w1(MetaMeasure.uniform(Ms), MetaMeasure.uniform(Ns)) <= matched_l1(Ms, Ns) + 1e-9
