"""
Module that runs opinion formation over time: plain rounds, intervened rounds,
full coverage rounds, schedule resolution for the three timing options and
consensus detection.
"""
import numpy as np
import pandas as pd

from .exceptions import ConfigError, OutputError, RangeTooSmallError
from .linalg import (
    ExtendedMatrix, as_opinion_vector, check_lambda, consensus_gap, mat_vec,
    normalize_targets, scaled_rows
)
from .logger import LOGGER
from .rng import XorShift64Star

CONSENSUS = "consensus"
START = "start"
UNIFORM = "uniform"
TIMING_OPTIONS = (CONSENSUS, START, UNIFORM)

DEFAULT_HORIZON = 3000
DEFAULT_EPSILON = 1e-9

EXPLICIT = "explicit"
CONSENSUS_TRIGGERED = "consensus-triggered"


def extend_matrix(matrix, targets, lam):
    """Build the extended interaction matrix with a stubborn external agent"""
    return ExtendedMatrix(matrix, targets, lam)


def step_plain(matrix, opinions):
    return mat_vec(matrix, opinions)


def step_extended(extended, opinions, external_opinion=1.0):
    """
    Literal intervened round: the first n entries of A (p; a). Uses the same
    operation order as step_intervened, so both agree bit for bit when a is 1.
    """
    n = extended.n
    opinions = as_opinion_vector(opinions, n)
    block = np.ascontiguousarray(extended.entries[:n, :n])
    return block.dot(opinions) + extended.external_column * external_opinion


def step_intervened(matrix, targets, lam, opinions):
    """
    Decomposed intervened round (T - lam (T)_m) p + Lambda with the external
    opinion fixed at 1.
    """
    lam = check_lambda(lam)
    targets = normalize_targets(targets, matrix.n)
    opinions = as_opinion_vector(opinions, matrix.n)

    external = np.zeros(matrix.n, dtype=float)
    external[list(targets)] = lam
    return scaled_rows(matrix.entries, targets, lam).dot(opinions) + external * 1.0


def step_full_coverage(matrix, lam, opinions):
    """(1 - lam) T p + (lam, ..., lam)"""
    lam = check_lambda(lam)
    opinions = as_opinion_vector(opinions, matrix.n)
    return (1.0 - lam) * mat_vec(matrix, opinions) + lam


def run_to_consensus(matrix, opinions, epsilon=DEFAULT_EPSILON, max_rounds=DEFAULT_HORIZON):
    """
    Apply plain rounds until the consensus gap drops to epsilon or max_rounds
    are spent. Returns (opinions, rounds, converged).
    """
    if epsilon <= 0:
        raise ValueError("epsilon must be positive, got {0}".format(epsilon))

    opinions = as_opinion_vector(opinions, matrix.n)
    rounds = 0
    while consensus_gap(opinions) > epsilon:
        if rounds >= max_rounds:
            log = "No consensus after {0} rounds, gap {1!r}".format(
                rounds, consensus_gap(opinions))
            LOGGER.debug(log)
            return opinions, rounds, False
        opinions = step_plain(matrix, opinions)
        rounds += 1

    return opinions, rounds, True


class Scenario(object):
    """
    One fully specified experiment: network, targets, intensity, duration,
    timing option, horizon, uniform sampling range, consensus threshold and
    seed.
    """

    def __init__(self, **kwargs):
        self.matrix = kwargs["matrix"]
        self.targets = normalize_targets(kwargs.get("targets", ()), self.matrix.n)
        self.lam = check_lambda(kwargs["lam"])
        self.k = kwargs.get("k", 0)
        self.timing = kwargs.get("timing", CONSENSUS)
        self.horizon = kwargs.get("horizon", DEFAULT_HORIZON)
        self.uniform_range = tuple(
            kwargs.get("uniform_range") or (1, max(1, self.horizon // 2)))
        self.epsilon = kwargs.get("epsilon", DEFAULT_EPSILON)
        self.seed = kwargs.get("seed", 0)
        self.keep_full_trace = kwargs.get("keep_full_trace", True)

        self.validate()

    def validate(self):
        if isinstance(self.k, bool) or not isinstance(self.k, int) or self.k < 0:
            raise ConfigError("Duration k must be a non-negative integer, got {0}".format(self.k))
        if self.timing not in TIMING_OPTIONS:
            raise ConfigError("Unknown timing option {0!r}".format(self.timing))
        if self.horizon < 1:
            raise ConfigError("Horizon must be positive, got {0}".format(self.horizon))
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive, got {0}".format(self.epsilon))
        low, high = self.uniform_range
        if low < 1 or high < low:
            raise ConfigError("Invalid uniform range {0}".format(self.uniform_range))

    @property
    def n(self):
        return self.matrix.n

    @property
    def full_coverage(self):
        return len(self.targets) == self.matrix.n

    def __str__(self):
        return (
            "Scenario with {0} agents, {1} targets, intensity {2}, duration {3},"
            " timing {4} and seed {5}"
        ).format(self.n, len(self.targets), self.lam, self.k, self.timing, self.seed)


class InterventionSchedule(object):
    """
    Resolved participation of the external agent: either an explicit sorted
    set of rounds (start, uniform) or a count of consensus-triggered
    interventions.
    """

    def __init__(self, **kwargs):
        self.kind = kwargs["kind"]
        self.explicit_rounds = tuple(sorted(set(kwargs.get("explicit_rounds", ()))))
        self.remaining = kwargs.get("remaining", 0)

        if self.kind == EXPLICIT and any(r < 1 for r in self.explicit_rounds):
            raise ConfigError("Scheduled rounds must be >= 1: {0}".format(self.explicit_rounds))

    @property
    def last_round(self):
        return self.explicit_rounds[-1] if self.explicit_rounds else 0

    def __str__(self):
        if self.kind == EXPLICIT:
            return "Explicit schedule at rounds {0}".format(list(self.explicit_rounds))
        return "Consensus-triggered schedule with {0} interventions".format(self.remaining)


def build_schedule(scenario):
    if scenario.timing == CONSENSUS:
        return InterventionSchedule(kind=CONSENSUS_TRIGGERED, remaining=scenario.k)

    if scenario.timing == START:
        return InterventionSchedule(kind=EXPLICIT, explicit_rounds=range(1, scenario.k + 1))

    low, high = scenario.uniform_range
    size = high - low + 1
    if scenario.k > size:
        raise RangeTooSmallError(
            "Cannot place {0} interventions in range {1}..{2}".format(scenario.k, low, high))
    rng = XorShift64Star(scenario.seed)
    rounds = rng.sample(range(low, high + 1), scenario.k)
    return InterventionSchedule(kind=EXPLICIT, explicit_rounds=rounds)


class SimulationTrace(object):
    """
    Opinion snapshots over a simulation plus convergence metadata. Each
    snapshot is stored together with the round it was taken after and whether
    that round was intervened.
    """

    def __init__(self, keep_full_trace=True):
        self.keep_full_trace = keep_full_trace
        self.opinions = []
        self.snapshot_rounds = []
        self.snapshot_intervened = []
        self.intervention_rounds = []
        self.rounds_executed = 0
        self.converged = False
        self.horizon_exhausted = False
        self.final_gap = None

    def record(self, round_index, opinions, intervened=False, key=False):
        if not (self.keep_full_trace or key or intervened):
            return
        if self.snapshot_rounds and self.snapshot_rounds[-1] == round_index:
            return
        self.opinions.append(opinions)
        self.snapshot_rounds.append(round_index)
        self.snapshot_intervened.append(intervened)

    def finish(self, opinions, rounds_executed, epsilon, converged):
        self.record(rounds_executed, opinions, key=True)
        self.rounds_executed = rounds_executed
        self.final_gap = consensus_gap(opinions)
        self.converged = converged and self.final_gap <= epsilon

    @property
    def final_opinions(self):
        return self.opinions[-1]

    def to_frame(self):
        """Long format frame: round, agent_index, opinion, intervened_flag"""
        columns = {"round": [], "agent_index": [], "opinion": [], "intervened_flag": []}
        for round_index, opinions, flag in zip(
                self.snapshot_rounds, self.opinions, self.snapshot_intervened):
            for agent, value in enumerate(opinions):
                columns["round"].append(round_index)
                columns["agent_index"].append(agent)
                columns["opinion"].append(float(value))
                columns["intervened_flag"].append(int(flag))
        return pd.DataFrame(columns, columns=list(columns))

    def __str__(self):
        return (
            "Simulation trace over {0} rounds with interventions at {1}, converged: {2},"
            " final gap {3!r}"
        ).format(self.rounds_executed, self.intervention_rounds, self.converged, self.final_gap)


def export_trace_csv(trace, path):
    try:
        trace.to_frame().to_csv(path, index=False, float_format="%.17g")
    except OSError as exc:
        raise OutputError("Failed writing trace to {0}: {1}".format(path, exc))


def _simulate_explicit(scenario, schedule, trace):
    matrix = scenario.matrix
    scheduled = set(schedule.explicit_rounds)
    opinions = np.zeros(matrix.n, dtype=float)
    trace.record(0, opinions, key=True)

    round_index = 0
    while round_index < scenario.horizon:
        if round_index >= schedule.last_round and consensus_gap(opinions) <= scenario.epsilon:
            break
        round_index += 1
        if round_index in scheduled:
            opinions = step_intervened(matrix, scenario.targets, scenario.lam, opinions)
            trace.intervention_rounds.append(round_index)
            trace.record(round_index, opinions, intervened=True)
        else:
            opinions = step_plain(matrix, opinions)
            trace.record(round_index, opinions)

    done = round_index >= schedule.last_round
    if not done or consensus_gap(opinions) > scenario.epsilon:
        trace.horizon_exhausted = True
    trace.finish(opinions, round_index, scenario.epsilon, done)


def _consensus_phase(scenario, opinions, used, trace):
    """run_to_consensus that records every plain round when asked to"""
    budget = scenario.horizon - used
    if not scenario.keep_full_trace:
        return run_to_consensus(scenario.matrix, opinions, scenario.epsilon, budget)

    rounds = 0
    while consensus_gap(opinions) > scenario.epsilon:
        if rounds >= budget:
            return opinions, rounds, False
        opinions = step_plain(scenario.matrix, opinions)
        rounds += 1
        trace.record(used + rounds, opinions)
    return opinions, rounds, True


def _simulate_consensus(scenario, schedule, trace):
    opinions = np.zeros(scenario.n, dtype=float)
    trace.record(0, opinions, key=True)
    used = 0
    converged = True

    for _ in range(schedule.remaining):
        opinions, rounds, converged = _consensus_phase(scenario, opinions, used, trace)
        used += rounds
        if not converged or used >= scenario.horizon:
            converged = False
            break
        opinions = step_intervened(scenario.matrix, scenario.targets, scenario.lam, opinions)
        used += 1
        trace.intervention_rounds.append(used)
        trace.record(used, opinions, intervened=True)

    if converged:
        opinions, rounds, converged = _consensus_phase(scenario, opinions, used, trace)
        used += rounds

    trace.horizon_exhausted = not converged
    trace.finish(opinions, used, scenario.epsilon, converged)


def simulate(scenario):
    """
    Run a scenario from all-zero initial opinions with the external opinion
    at 1. Horizon exhaustion is flagged on the trace, not raised.
    """
    schedule = build_schedule(scenario)
    trace = SimulationTrace(keep_full_trace=scenario.keep_full_trace)

    if schedule.kind == EXPLICIT:
        _simulate_explicit(scenario, schedule, trace)
    else:
        _simulate_consensus(scenario, schedule, trace)

    if trace.horizon_exhausted:
        log = "Horizon of {0} rounds exhausted for {1}".format(scenario.horizon, scenario)
        LOGGER.warning(log)
    else:
        log = "Simulated {0}: {1}".format(scenario, trace)
        LOGGER.debug(log)

    return trace
