"""
Module hosting the numerical check suites behind the `verify` command. Each
suite draws its cases from a seeded xorshift64* source and compares simulated
or closed-form quantities against their analytical counterparts.
"""
import numpy as np

from .analytics import (
    closed_form_influence, lemma1_check, lemma2_check, marginal_round_gain,
    measured_influence, social_influence_vector
)
from .dynamics import (
    CONSENSUS, UNIFORM, Scenario, extend_matrix, simulate, step_extended,
    step_intervened
)
from .linalg import InteractionMatrix
from .logger import LOGGER
from .netgen import NetworkSpec, generate_interaction_matrix
from .rng import XorShift64Star, derive_seed

ANALYTIC_TOL = 1e-12
EXACT_TOL = 1e-15
SIMULATION_TOL = 1e-6
TIMING_TOL = 1e-8


class CheckResult(object):
    """Outcome of one check suite"""

    def __init__(self, name, passed, cases, worst):
        self.name = name
        self.passed = passed
        self.cases = cases
        self.worst = worst

    def __str__(self):
        return "{0}: {1} over {2} cases, worst deviation {3!r}".format(
            self.name, "passed" if self.passed else "FAILED", self.cases, self.worst)


def random_stochastic(rng, n):
    """Dense random row-stochastic matrix, rows normalized from uniform draws"""
    entries = np.array([[rng.random() + 1e-3 for _ in range(n)] for _ in range(n)])
    return InteractionMatrix(entries / entries.sum(axis=1, keepdims=True))


def check_consensus_closed_form(seed=0, networks=50, n=10):
    """Consensus-timing influence equals 1 - (1 - s lam)^k"""
    rng = XorShift64Star(derive_seed(seed, "consensus_closed_form"))
    worst = 0.0
    cases = 0
    for index in range(networks):
        matrix = generate_interaction_matrix(
            NetworkSpec(n=n, seed=derive_seed(seed, "closed-form-network", index)))
        influence = social_influence_vector(matrix)
        for lam in (0.1, 0.3, 0.5):
            for k in range(1, 6):
                targets = rng.sample(range(n), 1 + rng.randbelow(n))
                trace = simulate(Scenario(
                    matrix=matrix, targets=targets, lam=lam, k=k, timing=CONSENSUS,
                    keep_full_trace=False))
                s_combined = min(influence.combined(targets), 1.0)
                predicted = closed_form_influence(k, lam, s_combined)
                worst = max(worst, abs(measured_influence(trace) - predicted))
                cases += 1
    return CheckResult("consensus_closed_form", worst <= SIMULATION_TOL, cases, worst)


def check_extended_equivalence(seed=0, draws=1000):
    """Literal extended-matrix round equals the decomposed intervened round"""
    rng = XorShift64Star(derive_seed(seed, "extended"))
    worst = 0.0
    for _ in range(draws):
        n = 2 + rng.randbelow(7)
        matrix = random_stochastic(rng, n)
        targets = rng.sample(range(n), rng.randbelow(n + 1))
        lam = rng.uniform(0.01, 0.99)
        opinions = np.array([rng.random() for _ in range(n)])
        literal = step_extended(extend_matrix(matrix, targets, lam), opinions)
        decomposed = step_intervened(matrix, targets, lam, opinions)
        worst = max(worst, float(np.max(np.abs(literal - decomposed))))
    return CheckResult("extended_equivalence", worst <= EXACT_TOL, draws, worst)


def check_scaling_identity(seed=0, draws=1000):
    """Scaling intensity and scaling coverage by r give the same influence"""
    rng = XorShift64Star(derive_seed(seed, "scaling_identity"))
    worst = 0.0
    for _ in range(draws):
        k = rng.randbelow(30)
        lam = rng.uniform(0.01, 0.9)
        s = rng.uniform(0.01, 0.9)
        r = rng.uniform(1.0, 0.999 / max(lam, s))
        lhs, rhs = lemma1_check(k, lam, s, r)
        worst = max(worst, abs(lhs - rhs))
    return CheckResult("scaling_identity", worst <= ANALYTIC_TOL, draws, worst)


def check_coverage_beats_duration():
    """Scaling coverage by an integer r beats scaling duration by r"""
    grid = [round(0.05 * i, 2) for i in range(1, 10)]
    smallest = None
    cases = 0
    for r in (2, 3, 4):
        for k in range(1, 11):
            for lam in grid:
                for s in grid:
                    if r * lam >= 1 or r * s >= 1:
                        continue
                    coverage, duration = lemma2_check(k, lam, s, r)
                    margin = coverage - duration
                    smallest = margin if smallest is None else min(smallest, margin)
                    cases += 1
    passed = smallest is not None and smallest > 0
    return CheckResult("coverage_beats_duration", passed, cases, smallest)


def check_diminishing_returns(seed=0, pairs=100, max_k=20):
    """Each extra consensus-timed round adds strictly less than the previous"""
    rng = XorShift64Star(derive_seed(seed, "diminishing"))
    passed = True
    smallest = None
    for _ in range(pairs):
        lam = rng.uniform(0.01, 0.99)
        s = rng.uniform(0.01, 1.0)
        gains = [marginal_round_gain(k, lam, s) for k in range(max_k + 1)]
        for before, after in zip(gains, gains[1:]):
            drop = before - after
            smallest = drop if smallest is None else min(smallest, drop)
            passed = passed and after < before
    return CheckResult("diminishing_returns", passed, pairs, smallest)


def check_full_coverage_timing(seed=0, n=10, k=5, lam=0.3, schedules=20, horizon=200):
    """At full coverage every schedule yields the same influence, 1 - (1 - lam)^k"""
    matrix = generate_interaction_matrix(
        NetworkSpec(n=n, seed=derive_seed(seed, "full-coverage")))
    everyone = list(range(n))
    values = []
    for index in range(schedules):
        trace = simulate(Scenario(
            matrix=matrix, targets=everyone, lam=lam, k=k, timing=UNIFORM, horizon=horizon,
            uniform_range=(1, horizon // 2),
            seed=derive_seed(seed, "full-coverage-schedule", index),
            keep_full_trace=False))
        values.append(measured_influence(trace))
    trace = simulate(Scenario(
        matrix=matrix, targets=everyone, lam=lam, k=k, timing=CONSENSUS, horizon=horizon,
        keep_full_trace=False))
    values.append(measured_influence(trace))

    spread = max(values) - min(values)
    error = max(abs(value - closed_form_influence(k, lam, 1.0)) for value in values)
    passed = spread <= TIMING_TOL and error <= SIMULATION_TOL
    return CheckResult("full_coverage_timing", passed, len(values), max(spread, error))


def run_checks(seed=0):
    results = [
        check_consensus_closed_form(seed),
        check_extended_equivalence(seed),
        check_scaling_identity(seed),
        check_coverage_beats_duration(),
        check_diminishing_returns(seed),
        check_full_coverage_timing(seed),
    ]
    for result in results:
        log = str(result)
        if result.passed:
            LOGGER.info(log)
        else:
            LOGGER.error(log)
    return results
