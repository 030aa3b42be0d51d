"""
Module to host the dense linear algebra primitives and the opinion-state types
shared by the rest of the package.

Agents are indexed from 0. An opinion vector is a 1-D float64 numpy array.
"""
import numbers

import numpy as np

from .exceptions import (
    DimensionMismatchError, EmptyVectorError, InvalidLambdaError,
    InvalidTargetsError, NegativeEntryError, NotSquareError,
    RowSumViolationError
)

DEFAULT_TOL = 1e-12


def _read_only(array):
    array.flags.writeable = False
    return array


def as_opinion_vector(values, n=None):
    """Return values as a float64 vector, checking its length against n"""
    vector = np.asarray(values, dtype=float)
    if vector.ndim != 1:
        raise DimensionMismatchError(
            "Opinion vector must be one dimensional, got shape {0}".format(vector.shape))
    if n is not None and vector.shape[0] != n:
        raise DimensionMismatchError(
            "Opinion vector has length {0}, expected {1}".format(vector.shape[0], n))
    return vector


def check_lambda(lam):
    """Intensity must lie strictly between 0 and 1"""
    if isinstance(lam, bool) or not isinstance(lam, numbers.Real) or not 0.0 < lam < 1.0:
        raise InvalidLambdaError("lambda must satisfy 0 < lambda < 1, got {0}".format(lam))
    return float(lam)


def normalize_targets(targets, n):
    """
    Turn any iterable of agent indices into a sorted tuple of distinct ints
    inside range(n).
    """
    normalized = set()
    for index in targets:
        if isinstance(index, bool) or not isinstance(index, numbers.Integral):
            raise InvalidTargetsError("Target index {0!r} is not an integer".format(index))
        if not 0 <= index < n:
            raise InvalidTargetsError(
                "Target index {0} outside of 0..{1}".format(index, n - 1))
        normalized.add(int(index))
    return tuple(sorted(normalized))


def target_mask(targets, n):
    mask = np.zeros(n, dtype=bool)
    mask[list(targets)] = True
    return mask


def scaled_rows(entries, targets, lam):
    """
    Copy of entries with the target rows multiplied by (1 - lam).
    This is the upper-left n x n block of the extended matrix and the
    (T - lam (T)_m) factor of the decomposed intervened round.
    """
    block = np.array(entries, dtype=float)
    rows = list(targets)
    block[rows, :] = (1.0 - lam) * block[rows, :]
    return block


class InteractionMatrix(object):
    """
    Row-stochastic n x n matrix of interpersonal weights. Entry (i, j) is the
    weight agent i places on agent j.
    """

    def __init__(self, entries, tol=DEFAULT_TOL):
        array = np.array(entries, dtype=float)
        if array.ndim != 2 or array.shape[0] != array.shape[1] or array.shape[0] == 0:
            raise NotSquareError(
                "Interaction matrix must be square and non-empty, got shape {0}".format(
                    array.shape))
        if tol <= 0:
            raise ValueError("tol must be positive, got {0}".format(tol))

        negative = np.argwhere(array < 0)
        if negative.size:
            i, j = negative[0]
            raise NegativeEntryError(
                "Entry ({0}, {1}) is negative: {2}".format(i, j, array[i, j]))

        deviation = np.abs(array.sum(axis=1) - 1.0)
        worst = int(np.argmax(deviation))
        if deviation[worst] > tol:
            raise RowSumViolationError(
                "Row {0} sums to {1!r}, more than {2} away from 1".format(
                    worst, float(array[worst].sum()), tol))

        self.entries = _read_only(array)
        self.n = array.shape[0]
        self.tol = tol

    def __eq__(self, other):
        if not isinstance(other, InteractionMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __str__(self):
        return "Interaction matrix over {0} agents with {1} positive entries".format(
            self.n, int(np.count_nonzero(self.entries)))


class ExtendedMatrix(object):
    """
    (n+1) x (n+1) matrix embedding an interaction matrix and a stubborn
    external agent in the last row and column. Target rows are scaled by
    (1 - lam) and hold lam in the external column; the last row is the unit
    stubborn row.

    Targets are kept as an explicit index set instead of being moved to the
    first m rows.
    """

    def __init__(self, base, targets, lam):
        self.base = base
        self.targets = normalize_targets(targets, base.n)
        self.lam = check_lambda(lam)
        self.m = len(self.targets)

        n = base.n
        entries = np.zeros((n + 1, n + 1), dtype=float)
        entries[:n, :n] = scaled_rows(base.entries, self.targets, self.lam)
        entries[list(self.targets), n] = self.lam
        entries[n, n] = 1.0
        self.entries = _read_only(entries)

    @property
    def n(self):
        return self.base.n

    @property
    def external_column(self):
        """The Lambda vector: lam at target indices, 0 elsewhere"""
        return self.entries[:self.n, self.n]

    def __str__(self):
        return (
            "Extended matrix over {0} agents, {1} targets, intensity {2}"
        ).format(self.n, self.m, self.lam)


def validate_stochastic(entries, tol=DEFAULT_TOL):
    """Validate a square array and return it as an InteractionMatrix"""
    return InteractionMatrix(entries, tol=tol)


def _entries_of(matrix):
    return getattr(matrix, "entries", matrix)


def mat_vec(matrix, vector):
    """One synchronous averaging round: result_i = sum_j M_ij v_j"""
    entries = np.asarray(_entries_of(matrix), dtype=float)
    vector = as_opinion_vector(vector)
    if entries.ndim != 2 or entries.shape[1] != vector.shape[0]:
        raise DimensionMismatchError(
            "Cannot multiply matrix of shape {0} with vector of length {1}".format(
                entries.shape, vector.shape[0]))
    return entries.dot(vector)


def consensus_gap(vector):
    """max(v) - min(v); zero iff the vector is an exact consensus"""
    vector = np.asarray(vector, dtype=float)
    if vector.size == 0:
        raise EmptyVectorError("Consensus gap of an empty vector is undefined")
    return float(vector.max() - vector.min())
