"""Module that implements tests for degroot analytics module."""
import logging
from unittest import main, TestCase

import mock
import numpy as np
from numpy.testing import assert_allclose

from degroot.analytics import (
    InfluenceReport, SocialInfluenceVector, closed_form_influence, influence_report,
    lemma1_check, lemma2_check, marginal_round_gain, measured_influence, row_limit_deviation,
    schedule_limit, social_influence_vector, start_two_round_limit
)
from degroot.dynamics import (
    CONSENSUS, EXPLICIT, START, UNIFORM, InterventionSchedule, Scenario, simulate
)
from degroot.exceptions import (
    DomainError, InvalidLambdaError, NoConvergenceError, NotConvergedError
)
from degroot.linalg import InteractionMatrix
from degroot.logger import LOGGER
from degroot.netgen import NetworkSpec, generate_interaction_matrix

HALF = InteractionMatrix([[0.5, 0.5], [0.5, 0.5]])


class MockLoggingHandler(logging.Handler):
    """Mock logging handler to check for expected logs."""

    def __init__(self, *args, **kwargs):
        self.reset()
        logging.Handler.__init__(self, *args, **kwargs)

    def emit(self, record):
        self.messages[record.levelname.lower()].append(record.getMessage())

    def reset(self):
        self.messages = {
            'debug': [],
            'info': [],
            'warning': [],
            'error': [],
            'critical': [],
        }


class TestSocialInfluenceVector(TestCase):
    """Test class to host tests for social_influence_vector."""

    def test_doubly_stochastic_is_uniform(self):
        """Columns summing to 1 give the uniform vector."""
        assert_allclose(social_influence_vector(HALF).weights, [0.5, 0.5])
        cyclic = InteractionMatrix([[0.2, 0.5, 0.3], [0.3, 0.2, 0.5], [0.5, 0.3, 0.2]])
        assert_allclose(social_influence_vector(cyclic).weights, [1 / 3.0] * 3, atol=1e-12)

    def test_hand_solved(self):
        """s T = s on [[0, 1], [0.5, 0.5]] gives (1/3, 2/3)."""
        influence = social_influence_vector(InteractionMatrix([[0, 1], [0.5, 0.5]]))
        assert_allclose(influence.weights, [1 / 3.0, 2 / 3.0], atol=1e-12)
        self.assertEqual(influence.ranking(), [1, 0])

    def test_fixed_point_on_generated(self):
        """The vector sums to 1 and is a fixed point of s T."""
        matrix = generate_interaction_matrix(NetworkSpec(n=30, seed=3))
        influence = social_influence_vector(matrix)
        self.assertAlmostEqual(float(influence.weights.sum()), 1.0, places=12)
        self.assertTrue(np.all(influence.weights > 0))
        self.assertLessEqual(influence.residual, 1e-11)

    def test_row_limit(self):
        """Rows of T^t approach s."""
        matrix = generate_interaction_matrix(NetworkSpec(n=100, seed=0))
        influence = social_influence_vector(matrix)
        self.assertLess(row_limit_deviation(matrix, influence, 3000), 1e-9)

    def test_no_convergence(self):
        """A periodic matrix never settles."""
        rotate = InteractionMatrix([[0, 1, 0], [0, 0, 1], [1, 0, 0]])
        # the uniform start is already a fixed point of a permutation
        assert_allclose(social_influence_vector(rotate).weights, [1 / 3.0] * 3)
        with self.assertRaises(NoConvergenceError):
            social_influence_vector(
                InteractionMatrix([[0, 1, 0], [0.5, 0, 0.5], [0, 1, 0]]), max_iter=50)

    def test_combined(self):
        """Combined influence sums target weights."""
        influence = SocialInfluenceVector([0.2, 0.3, 0.5])
        self.assertAlmostEqual(influence.combined([0, 2]), 0.7)
        self.assertEqual(influence.combined([]), 0.0)
        self.assertEqual(influence.ranking(), [2, 1, 0])


class TestClosedForm(TestCase):
    """Test class to host tests for the closed form and marginal gains."""

    def test_closed_form(self):
        """Geometric series partial sums."""
        self.assertAlmostEqual(closed_form_influence(1, 0.5, 0.2), 0.1, places=15)
        self.assertAlmostEqual(closed_form_influence(2, 0.5, 0.2), 0.19, places=15)
        self.assertEqual(closed_form_influence(0, 0.5, 0.2), 0.0)

    def test_marginal_gain(self):
        """First gain is s lam, then it shrinks by 1 - s lam."""
        self.assertAlmostEqual(marginal_round_gain(0, 0.5, 0.2), 0.1, places=15)
        self.assertAlmostEqual(marginal_round_gain(1, 0.5, 0.2), 0.09, places=15)
        for k in range(10):
            self.assertAlmostEqual(
                closed_form_influence(k + 1, 0.3, 0.4) - closed_form_influence(k, 0.3, 0.4),
                marginal_round_gain(k, 0.3, 0.4), places=14)

    def test_strictly_increasing(self):
        """Influence grows strictly with duration, intensity and coverage."""
        by_duration = [closed_form_influence(k, 0.4, 0.3) for k in range(11)]
        by_intensity = [closed_form_influence(3, lam / 10.0, 0.5) for lam in range(1, 10)]
        by_coverage = [closed_form_influence(3, 0.5, s / 10.0) for s in range(1, 11)]
        for series in (by_duration, by_intensity, by_coverage):
            for lower, higher in zip(series, series[1:]):
                self.assertLess(lower, higher)

    def test_domain_errors(self):
        """Out of range arguments are domain errors."""
        with self.assertRaises(InvalidLambdaError):
            closed_form_influence(1, 0.0, 0.2)
        with self.assertRaises(DomainError):
            closed_form_influence(-1, 0.5, 0.2)
        with self.assertRaises(DomainError):
            closed_form_influence(1, 0.5, 1.2)
        with self.assertRaises(DomainError):
            marginal_round_gain(2, 0.5, 0.0)

    def test_scaling_identity(self):
        """Scaling intensity or coverage by r gives the same influence."""
        lhs, rhs = lemma1_check(3, 0.2, 0.3, 1.5)
        self.assertAlmostEqual(lhs, 1 - 0.91 ** 3, places=14)
        self.assertAlmostEqual(lhs, rhs, places=15)
        lhs, rhs = lemma1_check(4, 0.25, 0.6, 1)
        self.assertEqual(lhs, rhs)
        with self.assertRaises(DomainError):
            lemma1_check(3, 0.6, 0.3, 2)
        with self.assertRaises(DomainError):
            lemma1_check(3, 0.2, 0.3, 0.5)

    def test_coverage_beats_duration(self):
        """Scaling coverage beats scaling duration."""
        coverage, duration = lemma2_check(1, 0.4, 0.2, 2)
        self.assertAlmostEqual(coverage, 0.16, places=15)
        self.assertAlmostEqual(duration, 1 - 0.92 ** 2, places=15)
        coverage, duration = lemma2_check(2, 0.1, 0.1, 3)
        self.assertAlmostEqual(coverage, 0.0591, places=14)
        self.assertAlmostEqual(duration, 1 - 0.99 ** 6, places=14)
        self.assertGreater(coverage, duration)
        with self.assertRaises(DomainError):
            lemma2_check(1, 0.1, 0.1, 1.5)
        with self.assertRaises(DomainError):
            lemma2_check(1, 0.1, 0.5, 2)
        with self.assertRaises(DomainError):
            lemma2_check(1, 0.6, 0.2, 2)


class TestScheduleLimits(TestCase):
    """Test class to host tests for the start and schedule limits."""

    def setUp(self):
        self.matrix = generate_interaction_matrix(NetworkSpec(n=5, seed=12))
        self.influence = social_influence_vector(self.matrix)

    def test_no_targets(self):
        """No targets means no external weight."""
        assert_allclose(start_two_round_limit(self.matrix, [], 0.3, 4), np.zeros(5))

    def test_two_rounds_match_simulation(self):
        """Interventions at rounds 1 and r agree with simulation."""
        for r in (2, 3, 7):
            limit = start_two_round_limit(self.matrix, [0, 3], 0.3, r, influence=self.influence)
            scenario = Scenario(matrix=self.matrix, targets=[0, 3], lam=0.3, k=2, timing=UNIFORM)
            schedule = InterventionSchedule(kind=EXPLICIT, explicit_rounds=(1, r))
            with mock.patch("degroot.dynamics.build_schedule") as mock_schedule:
                mock_schedule.return_value = schedule
                trace = simulate(scenario)
            assert_allclose(trace.final_opinions, limit, atol=1e-6)

    def test_two_rounds_invalid(self):
        """The second round comes after the first."""
        with self.assertRaises(DomainError):
            start_two_round_limit(self.matrix, [0], 0.3, 1)

    def test_schedule_limit_matches_start(self):
        """The start schedule limit equals the simulated one."""
        trace = simulate(Scenario(matrix=self.matrix, targets=[1, 2], lam=0.4, k=4, timing=START))
        limit = schedule_limit(self.matrix, [1, 2], 0.4, [1, 2, 3, 4], influence=self.influence)
        self.assertAlmostEqual(measured_influence(trace), limit, places=8)

    def test_schedule_limit_empty(self):
        """No rounds leave the opinions at 0."""
        self.assertEqual(schedule_limit(self.matrix, [1], 0.4, [], influence=self.influence), 0.0)


class TestMeasuredInfluence(TestCase):
    """Test class to host tests for measured_influence and influence_report."""

    def setUp(self):
        logging.basicConfig()
        logging.getLogger("degroot-influence").setLevel(logging.DEBUG)
        self.mock_handler = MockLoggingHandler()
        LOGGER.addHandler(self.mock_handler)

    def tearDown(self):
        LOGGER.removeHandler(self.mock_handler)

    def test_consensus_readout(self):
        """A converged trace reads its consensus value."""
        trace = simulate(Scenario(matrix=HALF, targets=[0], lam=0.5, k=1, timing=CONSENSUS))
        self.assertAlmostEqual(measured_influence(trace), 0.25, places=15)

    def test_no_intervention(self):
        """k = 0 measures nothing."""
        trace = simulate(Scenario(matrix=HALF, targets=[0], lam=0.5, k=0, timing=START))
        self.assertEqual(measured_influence(trace), 0.0)

    def test_not_converged(self):
        """Non converged traces cannot be read."""
        matrix = generate_interaction_matrix(NetworkSpec(n=20, seed=1))
        trace = simulate(Scenario(matrix=matrix, targets=[0], lam=0.5, k=1, timing=CONSENSUS,
                                  horizon=2))
        with self.assertRaises(NotConvergedError):
            measured_influence(trace)

    def test_consensus_timing_matches_closed_form(self):
        """Consensus timed influence equals 1 - (1 - s lam)^k."""
        for seed in range(5):
            matrix = generate_interaction_matrix(NetworkSpec(n=10, seed=seed))
            influence = social_influence_vector(matrix)
            targets = [seed, (seed + 3) % 10, 9]
            trace = simulate(Scenario(matrix=matrix, targets=targets, lam=0.3, k=4,
                                      timing=CONSENSUS, horizon=20000))
            predicted = closed_form_influence(4, 0.3, influence.combined(targets))
            self.assertLessEqual(abs(measured_influence(trace) - predicted), 1e-6)

    def test_more_influential_targets_win(self):
        """Under consensus timing a larger combined influence measures strictly higher."""
        matrix = generate_interaction_matrix(NetworkSpec(n=10, seed=7))
        influence = social_influence_vector(matrix)
        ranking = influence.ranking()
        high, low = ranking[:3], ranking[-3:]
        self.assertGreater(influence.combined(high), influence.combined(low))
        measured = []
        for targets in (high, low):
            trace = simulate(Scenario(matrix=matrix, targets=targets, lam=0.3, k=3,
                                      timing=CONSENSUS, horizon=20000))
            measured.append(measured_influence(trace))
        self.assertGreater(measured[0], measured[1])

    def test_report_closed_form(self):
        """Consensus timing reports against the closed form."""
        matrix = generate_interaction_matrix(NetworkSpec(n=10, seed=2))
        scenario = Scenario(matrix=matrix, targets=[1, 4], lam=0.2, k=3, timing=CONSENSUS)
        report = influence_report(scenario, simulate(scenario))
        self.assertEqual(report.method, "closed_form")
        self.assertLessEqual(report.abs_error, 1e-6)
        self.assertTrue(self.mock_handler.messages["info"][-1].startswith(
            "Built Influence report: measured"))

    def test_report_schedule_limit(self):
        """Start timing on a partial cover reports against the schedule limit."""
        matrix = generate_interaction_matrix(NetworkSpec(n=10, seed=2))
        scenario = Scenario(matrix=matrix, targets=[1, 4], lam=0.2, k=3, timing=START)
        report = influence_report(scenario, simulate(scenario))
        self.assertEqual(report.method, "schedule_limit")
        self.assertLessEqual(report.abs_error, 1e-6)

    def test_report_record(self):
        """Records are key=value lines with 17 significant digits."""
        report = InfluenceReport(measured=0.1, predicted=0.1, s_combined=0.2)
        self.assertEqual(
            report.to_record(),
            "measured=0.10000000000000001\npredicted=0.10000000000000001\n"
            "s_combined=0.20000000000000001\nabs_error=0\nmethod=closed_form\n")
        self.assertEqual(list(report.to_frame().columns), list(InfluenceReport.FIELDS))


if __name__ == '__main__':
    main()
