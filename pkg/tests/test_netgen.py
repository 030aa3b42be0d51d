"""Module that implements tests for degroot netgen module."""
import os
import logging
import tempfile
from unittest import main, TestCase

import mock
import numpy as np
from numpy.testing import assert_array_equal

from degroot.exceptions import (
    ConfigError, GenerationFailureError, NotStronglyConnectedError, OutputError
)
from degroot.linalg import InteractionMatrix
from degroot.logger import LOGGER
from degroot.netgen import (
    NetworkSpec, generate_interaction_matrix, is_aperiodic, is_strongly_connected,
    read_matrix_csv, write_matrix_csv
)


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


def ring(n):
    entries = np.zeros((n, n))
    for i in range(n):
        entries[i, (i + 1) % n] = 1.0
    return InteractionMatrix(entries)


class TestNetworkSpec(TestCase):
    """Test class to host tests for NetworkSpec."""

    def test_defaults(self):
        """Defaults describe a 100 agent network."""
        spec = NetworkSpec()
        self.assertEqual(spec.n, 100)
        self.assertEqual(spec.edge_density, 0.3)
        self.assertEqual(spec.self_loop_min, 0.1)
        self.assertEqual(spec.seed, 0)

    def test_invalid(self):
        """Out of range fields are rejected."""
        for kwargs in ({"n": 1}, {"edge_density": 0}, {"edge_density": 1.5},
                       {"self_loop_min": 0}, {"self_loop_min": 1}, {"seed": -1}):
            with self.assertRaises(ConfigError):
                NetworkSpec(**kwargs)

    def test_replace(self):
        """replace changes only the given fields."""
        spec = NetworkSpec(n=12, seed=3).replace(seed=9)
        self.assertEqual((spec.n, spec.seed), (12, 9))


class TestGenerateInteractionMatrix(TestCase):
    """Test class to host tests for generate_interaction_matrix."""

    def setUp(self):
        logging.basicConfig()
        logging.getLogger("degroot-influence").setLevel(logging.DEBUG)
        self.mock_handler = MockLoggingHandler()
        LOGGER.addHandler(self.mock_handler)

    def tearDown(self):
        LOGGER.removeHandler(self.mock_handler)

    def test_full_density_two_agents(self):
        """Full density on two agents gives four positive entries."""
        matrix = generate_interaction_matrix(
            NetworkSpec(n=2, edge_density=1.0, self_loop_min=0.1, seed=7))
        self.assertTrue(np.all(matrix.entries > 0))

    def test_passes_validators(self):
        """Generated matrices are strongly connected and aperiodic."""
        for seed in range(10):
            matrix = generate_interaction_matrix(
                NetworkSpec(n=10, edge_density=0.3, self_loop_min=0.1, seed=seed))
            self.assertTrue(is_strongly_connected(matrix))
            self.assertTrue(is_aperiodic(matrix))
            self.assertTrue(np.all(np.diag(matrix.entries) >= 0.1))

    def test_sparse_still_admissible(self):
        """Even a tiny density keeps the guaranteed cycle."""
        matrix = generate_interaction_matrix(NetworkSpec(n=30, edge_density=1e-6, seed=2))
        self.assertTrue(is_strongly_connected(matrix))

    def test_deterministic(self):
        """Same spec and seed give bit identical matrices."""
        spec = NetworkSpec(n=10, seed=1)
        assert_array_equal(
            generate_interaction_matrix(spec).entries, generate_interaction_matrix(spec).entries)
        self.assertFalse(np.array_equal(
            generate_interaction_matrix(spec).entries,
            generate_interaction_matrix(spec.replace(seed=2)).entries))

    def test_logs_generation(self):
        """A debug message names the spec."""
        generate_interaction_matrix(NetworkSpec(n=5, seed=3))
        self.assertTrue(self.mock_handler.messages["debug"][-1].startswith(
            "Generated interaction matrix from Network spec with 5 agents"))

    def test_generation_failure(self):
        """Repeatedly inadmissible draws raise after the retry budget."""
        with mock.patch("degroot.netgen.is_strongly_connected") as mock_connected:
            mock_connected.return_value = False
            with self.assertRaises(GenerationFailureError):
                generate_interaction_matrix(NetworkSpec(n=4, seed=0))
            self.assertEqual(mock_connected.call_count, 3)
            self.assertEqual(
                "Attempt 1 produced an inadmissible network",
                self.mock_handler.messages["warning"][0])


class TestGraphChecks(TestCase):
    """Test class to host tests for the connectivity and period checks."""

    def test_strong_connectivity(self):
        """Reachability on positive entries."""
        self.assertFalse(is_strongly_connected(InteractionMatrix([[1, 0], [0.5, 0.5]])))
        self.assertTrue(is_strongly_connected(InteractionMatrix([[0, 1], [1, 0]])))
        self.assertTrue(is_strongly_connected(InteractionMatrix([[0.5, 0.5], [0.5, 0.5]])))

    def test_aperiodicity(self):
        """gcd of cycle lengths."""
        self.assertFalse(is_aperiodic(InteractionMatrix([[0, 1], [1, 0]])))
        self.assertTrue(is_aperiodic(InteractionMatrix([[0.5, 0.5], [1, 0]])))
        self.assertFalse(is_aperiodic(ring(3)))

    def test_self_loop_makes_aperiodic(self):
        """One self loop on a ring is enough."""
        entries = ring(5).entries.copy()
        entries[2] = 0.0
        entries[2, 2] = 0.5
        entries[2, 3] = 0.5
        self.assertTrue(is_aperiodic(InteractionMatrix(entries)))

    def test_period_requires_connectivity(self):
        """Period is undefined on a disconnected graph."""
        with self.assertRaises(NotStronglyConnectedError):
            is_aperiodic(InteractionMatrix([[1, 0], [0.5, 0.5]]))


class TestMatrixCSV(TestCase):
    """Test class to host tests for matrix CSV import and export."""

    def test_round_trip(self):
        """Matrices survive a CSV round trip bit for bit."""
        matrix = generate_interaction_matrix(NetworkSpec(n=7, seed=11))
        with tempfile.TemporaryDirectory() as directory:
            path = os.path.join(directory, "matrix.csv")
            write_matrix_csv(matrix, path)
            with open(path) as handle:
                self.assertEqual(len(handle.read().splitlines()), 7)
            self.assertEqual(read_matrix_csv(path), matrix)

    def test_missing_file(self):
        """Reading a missing file is an output error."""
        with self.assertRaises(OutputError):
            read_matrix_csv("/nonexistent/matrix.csv")


if __name__ == '__main__':
    main()
