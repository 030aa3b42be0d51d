"""
Module that implements the analytical side of the external agent model: the
social influence vector, the closed-form influence function, marginal gains,
the coverage/intensity/duration comparisons, the two-intervention limit and
the measured-vs-predicted influence report.
"""
import numbers

import numpy as np
import pandas as pd

from .dynamics import CONSENSUS, step_intervened, step_plain
from .exceptions import DomainError, NoConvergenceError, NotConvergedError
from .linalg import check_lambda, normalize_targets, target_mask
from .logger import LOGGER

DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 1000000


class SocialInfluenceVector(object):
    """
    Normalized left eigenvector s of an interaction matrix for eigenvalue 1.
    Every row of lim T^t equals s.
    """

    def __init__(self, weights, residual=None, iterations=None):
        weights = np.array(weights, dtype=float)
        weights.flags.writeable = False
        self.weights = weights
        self.residual = residual
        self.iterations = iterations

    @property
    def n(self):
        return self.weights.shape[0]

    def combined(self, targets):
        """Combined social influence of a target set"""
        targets = normalize_targets(targets, self.n)
        return float(self.weights[list(targets)].sum())

    def ranking(self):
        """Agent indices by decreasing influence, ties by index"""
        return np.argsort(-self.weights, kind="stable").tolist()

    def __str__(self):
        return "Social influence vector over {0} agents, residual {1!r}".format(
            self.n, self.residual)


def social_influence_vector(matrix, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER):
    """
    Power iteration on the transpose: s <- s T from the uniform vector,
    renormalized to sum 1, until ||s T - s||_inf <= tol.
    """
    entries = matrix.entries
    weights = np.full(matrix.n, 1.0 / matrix.n)
    for iteration in range(1, max_iter + 1):
        following = weights.dot(entries)
        following /= following.sum()
        residual = float(np.max(np.abs(following - weights)))
        weights = following
        if residual <= tol:
            residual = float(np.max(np.abs(weights.dot(entries) - weights)))
            log = "Social influence vector converged after {0} iterations".format(iteration)
            LOGGER.debug(log)
            return SocialInfluenceVector(weights, residual=residual, iterations=iteration)

    raise NoConvergenceError(
        "Social influence vector did not converge in {0} iterations, residual {1!r}".format(
            max_iter, residual))


def row_limit_deviation(matrix, influence, rounds):
    """
    Max |(T^t)_ij - s_j| after t = rounds, without forming T^t: column j of
    T^t is the unit vector e_j pushed through t averaging rounds p <- T p,
    and it must approach s_j in every component.
    """
    worst = 0.0
    for agent in range(matrix.n):
        column = np.zeros(matrix.n, dtype=float)
        column[agent] = 1.0
        for _ in range(rounds):
            column = matrix.entries.dot(column)
        worst = max(worst, float(np.max(np.abs(column - influence.weights[agent]))))
    return worst


def _check_duration(k):
    if isinstance(k, bool) or not isinstance(k, numbers.Integral) or k < 0:
        raise DomainError("Duration must be a non-negative integer, got {0!r}".format(k))


def _check_combined(s):
    if isinstance(s, bool) or not isinstance(s, numbers.Real) or not 0.0 < s <= 1.0:
        raise DomainError("Combined influence must lie in (0, 1], got {0!r}".format(s))


def _check_influence_args(k, lam, s):
    _check_duration(k)
    check_lambda(lam)
    _check_combined(s)


def closed_form_influence(k, lam, s):
    """
    I(k, lam, s) = 1 - (1 - s lam)^k, the sum of the first k terms of the
    geometric series with start s lam and ratio 1 - s lam.
    """
    _check_influence_args(k, lam, s)
    return 1.0 - (1.0 - s * lam) ** k


def marginal_round_gain(k, lam, s):
    """I(k+1, lam, s) - I(k, lam, s) = (1 - s lam)^k s lam"""
    _check_influence_args(k, lam, s)
    return (1.0 - s * lam) ** k * s * lam


def lemma1_check(k, lam, s, r):
    """
    Scaling intensity or coverage by the same r gives the same influence.
    Returns (I(k, r lam, s), I(k, lam, r s)).
    """
    if isinstance(r, bool) or not isinstance(r, numbers.Real) or r < 1:
        raise DomainError("Scale factor must be a real >= 1, got {0!r}".format(r))
    if r * lam >= 1 or r * s >= 1:
        raise DomainError(
            "Scaled values must stay below 1: r lam = {0!r}, r s = {1!r}".format(r * lam, r * s))
    return closed_form_influence(k, r * lam, s), closed_form_influence(k, lam, r * s)


def lemma2_check(k, lam, s, r):
    """
    Scaling coverage beats scaling duration by the same integer r >= 2.
    Returns (I(k, lam, r s), I(r k, lam, s)); the first is strictly larger.
    """
    if isinstance(r, bool) or not isinstance(r, numbers.Integral) or r < 2:
        raise DomainError("Scale factor must be an integer >= 2, got {0!r}".format(r))
    if r * lam >= 1 or r * s >= 1:
        raise DomainError(
            "Scaled values must stay below 1: r lam = {0!r}, r s = {1!r}".format(r * lam, r * s))
    return closed_form_influence(k, lam, r * s), closed_form_influence(r * k, lam, s)


def start_two_round_limit(matrix, targets, lam, r, influence=None):
    """
    Limiting opinion vector when the external agent participates in rounds 1
    and r: 2 S Lambda - lam S (T^(r-1))_m Lambda, with S the consensus
    projection whose rows all equal s.
    """
    lam = check_lambda(lam)
    if isinstance(r, bool) or not isinstance(r, numbers.Integral) or r < 2:
        raise DomainError("Second intervention round must be an integer >= 2, got {0!r}".format(r))
    targets = normalize_targets(targets, matrix.n)
    if influence is None:
        influence = social_influence_vector(matrix)

    external = np.zeros(matrix.n, dtype=float)
    external[list(targets)] = lam

    propagated = external
    for _ in range(r - 1):
        propagated = step_plain(matrix, propagated)
    propagated = np.where(target_mask(targets, matrix.n), propagated, 0.0)

    value = 2.0 * influence.weights.dot(external) - lam * influence.weights.dot(propagated)
    return np.full(matrix.n, value)


def schedule_limit(matrix, targets, lam, rounds, influence=None):
    """
    Exact limiting opinion for an explicit schedule: propagate zero initial
    opinions through the scheduled rounds, then read s p at the last one.
    """
    targets = normalize_targets(targets, matrix.n)
    rounds = sorted(set(rounds))
    if rounds and rounds[0] < 1:
        raise DomainError("Scheduled rounds must be >= 1, got {0}".format(rounds))
    if influence is None:
        influence = social_influence_vector(matrix)

    scheduled = set(rounds)
    opinions = np.zeros(matrix.n, dtype=float)
    for round_index in range(1, (rounds[-1] if rounds else 0) + 1):
        if round_index in scheduled:
            opinions = step_intervened(matrix, targets, lam, opinions)
        else:
            opinions = step_plain(matrix, opinions)
    return float(influence.weights.dot(opinions))


def measured_influence(trace):
    """
    Limiting opinion of a converged trace, which is the external agent's
    social influence when initial opinions are 0 and the external one is 1.
    """
    if not trace.converged:
        raise NotConvergedError("Cannot read influence from a trace that did not converge")
    return float(np.mean(trace.final_opinions))


class InfluenceReport(object):
    """Measured external-agent influence next to its prediction"""

    FIELDS = ("measured", "predicted", "s_combined", "abs_error", "method")

    def __init__(self, **kwargs):
        self.measured = kwargs["measured"]
        self.predicted = kwargs["predicted"]
        self.s_combined = kwargs["s_combined"]
        self.method = kwargs.get("method", "closed_form")
        self.abs_error = abs(self.measured - self.predicted)

    def serialize(self):
        return dict((name, getattr(self, name)) for name in self.FIELDS)

    def to_record(self):
        """Flat key=value text record, one pair per line"""
        lines = []
        for name, value in self.serialize().items():
            if isinstance(value, float):
                value = "{0:.17g}".format(value)
            lines.append("{0}={1}".format(name, value))
        return "\n".join(lines) + "\n"

    def to_frame(self):
        return pd.DataFrame([self.serialize()], columns=list(self.FIELDS))

    def __str__(self):
        return (
            "Influence report: measured {0!r}, predicted {1!r} ({2}), combined influence {3!r},"
            " error {4!r}"
        ).format(self.measured, self.predicted, self.method, self.s_combined, self.abs_error)


def influence_report(scenario, trace, influence=None):
    """
    Compare the measured influence of a trace with the closed form (consensus
    timing or full coverage) or with the exact schedule limit otherwise.
    """
    if influence is None:
        influence = social_influence_vector(scenario.matrix)
    s_combined = influence.combined(scenario.targets)
    measured = measured_influence(trace)

    if scenario.k == 0 or not scenario.targets:
        predicted, method = 0.0, "closed_form"
    elif scenario.timing == CONSENSUS or scenario.full_coverage:
        predicted = closed_form_influence(scenario.k, scenario.lam, min(s_combined, 1.0))
        method = "closed_form"
    else:
        predicted = schedule_limit(
            scenario.matrix, scenario.targets, scenario.lam, trace.intervention_rounds,
            influence=influence)
        method = "schedule_limit"

    report = InfluenceReport(
        measured=measured, predicted=predicted, s_combined=s_combined, method=method)
    log = "Built {0}".format(report)
    LOGGER.info(log)
    return report
