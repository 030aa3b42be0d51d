"""
Module to generate and validate random interaction matrices that are strongly
connected and aperiodic, and to move them in and out of CSV files.
"""
import networkx as nx
import numpy as np
import pandas as pd

from .exceptions import (
    ConfigError, GenerationFailureError, NotStronglyConnectedError,
    OutputError, StochasticityError
)
from .linalg import DEFAULT_TOL, InteractionMatrix
from .logger import LOGGER
from .rng import XorShift64Star

SELF_LOOP_MAX = 0.9
MAX_ATTEMPTS = 3


class NetworkSpec(object):
    """
    Recipe for a random interaction matrix: agent count, expected fraction of
    optional directed edges, minimum self weight and seed.
    """

    def __init__(self, **kwargs):
        self.n = kwargs.get("n", 100)
        self.edge_density = kwargs.get("edge_density", 0.3)
        self.self_loop_min = kwargs.get("self_loop_min", 0.1)
        self.seed = kwargs.get("seed", 0)

        self.validate()

    def validate(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 2:
            raise ConfigError("Network needs at least 2 agents, got {0}".format(self.n))
        if not 0.0 < self.edge_density <= 1.0:
            raise ConfigError(
                "edge_density must lie in (0, 1], got {0}".format(self.edge_density))
        if not 0.0 < self.self_loop_min < 1.0:
            raise ConfigError(
                "self_loop_min must lie in (0, 1), got {0}".format(self.self_loop_min))
        if self.seed < 0:
            raise ConfigError("seed must be unsigned, got {0}".format(self.seed))

    def replace(self, **kwargs):
        """Copy of this spec with some fields changed"""
        fields = self.serialize()
        fields.update(kwargs)
        return NetworkSpec(**fields)

    def serialize(self):
        return {
            "n": self.n,
            "edge_density": self.edge_density,
            "self_loop_min": self.self_loop_min,
            "seed": self.seed,
        }

    def __str__(self):
        return (
            "Network spec with {0} agents, edge density {1}, minimum self weight {2}"
            " and seed {3}"
        ).format(self.n, self.edge_density, self.self_loop_min, self.seed)


def _build_entries(spec, rng):
    """
    A directed Hamiltonian cycle over a random agent order, every other
    off-diagonal edge with probability edge_density, and a self weight drawn
    from [self_loop_min, 0.9]; the rest of each row is spread evenly over its
    edges.
    """
    n = spec.n
    adjacency = np.zeros((n, n), dtype=bool)

    order = rng.permutation(n)
    for position, agent in enumerate(order):
        adjacency[agent, order[(position + 1) % n]] = True

    for i in range(n):
        for j in range(n):
            if i == j or adjacency[i, j]:
                continue
            if rng.random() < spec.edge_density:
                adjacency[i, j] = True

    upper = max(spec.self_loop_min, SELF_LOOP_MAX)
    entries = np.zeros((n, n), dtype=float)
    for i in range(n):
        self_weight = rng.uniform(spec.self_loop_min, upper)
        neighbours = np.flatnonzero(adjacency[i])
        entries[i, neighbours] = (1.0 - self_weight) / len(neighbours)
        entries[i, i] = self_weight

    return entries


def generate_interaction_matrix(spec):
    """
    Generate a row-stochastic, strongly connected and aperiodic interaction
    matrix. Deterministic given spec.seed.
    """
    rng = XorShift64Star(spec.seed)
    for attempt in range(1, MAX_ATTEMPTS + 1):
        try:
            matrix = InteractionMatrix(_build_entries(spec, rng))
        except StochasticityError as exc:
            log = "Attempt {0} produced an invalid matrix: {1}".format(attempt, exc)
            LOGGER.warning(log)
            continue

        if is_strongly_connected(matrix) and is_aperiodic(matrix):
            log = "Generated interaction matrix from {0}".format(spec)
            LOGGER.debug(log)
            return matrix

        log = "Attempt {0} produced an inadmissible network".format(attempt)
        LOGGER.warning(log)

    raise GenerationFailureError(
        "No admissible matrix after {0} attempts for {1}".format(MAX_ATTEMPTS, spec))


def to_digraph(matrix):
    """Directed graph with an edge (i, j) for every positive entry"""
    entries = getattr(matrix, "entries", matrix)
    graph = nx.DiGraph()
    graph.add_nodes_from(range(entries.shape[0]))
    rows, cols = np.nonzero(np.asarray(entries) > 0)
    graph.add_edges_from(zip(rows.tolist(), cols.tolist()))
    return graph


def is_strongly_connected(matrix):
    return nx.is_strongly_connected(to_digraph(matrix))


def is_aperiodic(matrix):
    """
    True iff the gcd of the cycle lengths is 1. networkx computes it from
    the level offsets of a breadth-first tree.
    """
    graph = to_digraph(matrix)
    if not nx.is_strongly_connected(graph):
        raise NotStronglyConnectedError(
            "Period is only defined for strongly connected matrices")
    return nx.is_aperiodic(graph)


def write_matrix_csv(matrix, path):
    """One row per line, comma separated, 17 significant digits"""
    frame = pd.DataFrame(matrix.entries)
    try:
        frame.to_csv(path, header=False, index=False, float_format="%.17g")
    except OSError as exc:
        raise OutputError("Failed writing matrix to {0}: {1}".format(path, exc))


def read_matrix_csv(path, tol=DEFAULT_TOL):
    try:
        frame = pd.read_csv(path, header=None, float_precision="round_trip")
    except OSError as exc:
        raise OutputError("Failed reading matrix from {0}: {1}".format(path, exc))
    return InteractionMatrix(frame.to_numpy(dtype=float), tol=tol)
