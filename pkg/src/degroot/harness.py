"""
Module that implements the batch experiment runner: sweeps of one factor
(duration, coverage or intensity) across timing options with seeded
replications, aggregated into report tables, plus the timing-option
comparison.
"""
import hashlib
import json
import math
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import pandas as pd

from .analytics import measured_influence, social_influence_vector
from .dynamics import (
    CONSENSUS, DEFAULT_EPSILON, DEFAULT_HORIZON, START, TIMING_OPTIONS, UNIFORM,
    Scenario, simulate
)
from .exceptions import ConfigError, InsufficientDataError
from .logger import LOGGER
from .netgen import NetworkSpec, generate_interaction_matrix
from .rng import XorShift64Star, derive_seed

DURATION = "duration"
COVERAGE = "coverage"
INTENSITY = "intensity"
FACTORS = (DURATION, COVERAGE, INTENSITY)

RANDOM = "random"
TOP_INFLUENCE = "top_influence"
TARGET_SELECTIONS = (RANDOM, TOP_INFLUENCE)

DEFAULT_REPLICATIONS = 1000
# default horizon of duration sweeps, every consensus phase counts against it
DURATION_HORIZON = 20000
DEFAULT_HELD_CONSTANTS = {"lam": 0.1, "coverage": 0.3, "duration": 10}
ORDER_TOL = 1e-9


def default_sweep_values(factor):
    if factor == DURATION:
        return list(range(0, 46))
    return [round(0.1 * i, 1) for i in range(10)]


def coverage_to_count(coverage, n):
    """m = round(c n), halves rounded up"""
    return int(math.floor(coverage * n + 0.5))


def select_targets(order, coverage, n):
    """The first round(c n) agents of a selection order"""
    return sorted(order[:coverage_to_count(coverage, n)])


class SweepConfig(object):
    """
    Everything a sweep needs: the network recipe, replication count, horizon,
    swept factor and its values, the two held constants, timing options,
    target selection and the base seed.
    """

    def __init__(self, **kwargs):
        network_spec = kwargs.get("network_spec") or NetworkSpec()
        if isinstance(network_spec, dict):
            network_spec = NetworkSpec(**network_spec)
        self.network_spec = network_spec
        self.replications = kwargs.get("replications", DEFAULT_REPLICATIONS)
        self.swept_factor = kwargs.get("swept_factor", DURATION)
        self.sweep_values = list(
            kwargs.get("sweep_values") or default_sweep_values(self.swept_factor))

        self.held_constants = dict(DEFAULT_HELD_CONSTANTS)
        self.held_constants.update(kwargs.get("held_constants") or {})

        self.timing_options = list(kwargs.get("timing_options") or TIMING_OPTIONS)
        self.target_selection = kwargs.get("target_selection", RANDOM)
        self.base_seed = kwargs.get("base_seed", 0)
        self.epsilon = kwargs.get("epsilon", DEFAULT_EPSILON)
        self.horizon = kwargs.get("horizon")
        self.uniform_range = kwargs.get("uniform_range")
        if self.horizon is None:
            self.horizon = DEFAULT_HORIZON
            if self.swept_factor == DURATION:
                self.horizon = DURATION_HORIZON
                self.uniform_range = self.uniform_range or (1, DEFAULT_HORIZON // 2)
        if self.uniform_range is not None:
            self.uniform_range = tuple(self.uniform_range)

        self.validate()

    def validate(self):
        if self.swept_factor not in FACTORS:
            raise ConfigError("Unknown swept factor {0!r}".format(self.swept_factor))
        if self.target_selection not in TARGET_SELECTIONS:
            raise ConfigError("Unknown target selection {0!r}".format(self.target_selection))
        if not self.timing_options:
            raise ConfigError("At least one timing option is needed")
        unknown = [t for t in self.timing_options if t not in TIMING_OPTIONS]
        if unknown:
            raise ConfigError("Unknown timing options {0}".format(unknown))
        if len(set(self.timing_options)) != len(self.timing_options):
            raise ConfigError("Duplicated timing options {0}".format(self.timing_options))
        if not isinstance(self.replications, int) or self.replications < 1:
            raise ConfigError("replications must be a positive integer")
        if not isinstance(self.horizon, int) or self.horizon < 1:
            raise ConfigError("horizon must be a positive integer")
        if self.epsilon <= 0:
            raise ConfigError("epsilon must be positive")
        if self.base_seed < 0:
            raise ConfigError("base_seed must be unsigned")
        if not self.sweep_values:
            raise ConfigError("At least one sweep value is needed")

        for value in self.sweep_values:
            self._validate_factor(self.swept_factor, value, swept=True)
        for factor, key in ((DURATION, "duration"), (COVERAGE, "coverage"),
                            (INTENSITY, "lam")):
            if factor != self.swept_factor:
                self._validate_factor(factor, self.held_constants[key], swept=False)

        if UNIFORM in self.timing_options:
            low, high = self.uniform_range or (1, max(1, self.horizon // 2))
            longest = max(self.cell_factors(v)[2] for v in self.sweep_values)
            if longest > high - low + 1:
                raise ConfigError(
                    "Duration {0} does not fit in uniform range {1}..{2}".format(
                        longest, low, high))

    @staticmethod
    def _validate_factor(factor, value, swept):
        if factor == DURATION:
            if isinstance(value, bool) or not isinstance(value, int) or value < 0:
                raise ConfigError("Duration values must be integers >= 0, got {0!r}".format(value))
        elif factor == COVERAGE:
            if not 0.0 <= value <= 1.0:
                raise ConfigError("Coverage values must lie in [0, 1], got {0!r}".format(value))
        else:
            low_ok = value >= 0.0 if swept else value > 0.0
            if not (low_ok and value < 1.0):
                raise ConfigError("Intensity values must lie in [0, 1), got {0!r}".format(value))

    def cell_factors(self, value):
        """(lam, coverage, duration) of the sweep cell at value"""
        lam = self.held_constants["lam"]
        coverage = self.held_constants["coverage"]
        duration = self.held_constants["duration"]
        if self.swept_factor == DURATION:
            duration = value
        elif self.swept_factor == COVERAGE:
            coverage = value
        else:
            lam = value
        return lam, coverage, int(duration)

    def serialize(self):
        return {
            "network_spec": self.network_spec.serialize(),
            "replications": self.replications,
            "horizon": self.horizon,
            "swept_factor": self.swept_factor,
            "sweep_values": list(self.sweep_values),
            "held_constants": dict(self.held_constants),
            "timing_options": list(self.timing_options),
            "target_selection": self.target_selection,
            "base_seed": self.base_seed,
            "epsilon": self.epsilon,
            "uniform_range": list(self.uniform_range) if self.uniform_range else None,
        }

    def config_hash(self):
        """SHA-256 of the canonical JSON form of the config"""
        text = json.dumps(self.serialize(), sort_keys=True)
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __str__(self):
        return (
            "{0} sweep over {1} values, timing options {2}, {3} replications on {4}"
        ).format(self.swept_factor, len(self.sweep_values), self.timing_options,
                 self.replications, self.network_spec)


class ReportRow(object):
    """Aggregated influence of one (timing option, swept value) cell"""

    FIELDS = ("timing_option", "swept_value", "mean_influence", "std_dev",
              "replication_count", "non_converged")

    def __init__(self, **kwargs):
        self.timing_option = kwargs["timing_option"]
        self.swept_value = kwargs["swept_value"]
        self.mean_influence = kwargs["mean_influence"]
        self.std_dev = kwargs["std_dev"]
        self.replication_count = kwargs["replication_count"]
        self.non_converged = kwargs.get("non_converged", 0)

    @property
    def flagged(self):
        return self.non_converged > 0

    def serialize(self):
        return dict((name, getattr(self, name)) for name in self.FIELDS)

    def __eq__(self, other):
        if not isinstance(other, ReportRow):
            return NotImplemented
        return self.serialize() == other.serialize()

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __str__(self):
        return (
            "{0} at {1}: mean influence {2!r}, std dev {3!r} over {4} replications"
            " ({5} not converged)"
        ).format(self.timing_option, self.swept_value, self.mean_influence, self.std_dev,
                 self.replication_count, self.non_converged)


class ReportTable(object):
    """Rows over timing options x sweep values plus provenance"""

    def __init__(self, rows=None, config_hash=None, base_seed=None, swept_factor=None):
        self.rows = list(rows or [])
        self.config_hash = config_hash
        self.base_seed = base_seed
        self.swept_factor = swept_factor

    def timing_options(self):
        present = set(row.timing_option for row in self.rows)
        return [timing for timing in TIMING_OPTIONS if timing in present]

    def swept_values(self):
        values = []
        for row in self.rows:
            if row.swept_value not in values:
                values.append(row.swept_value)
        return values

    def series(self, timing):
        return [row for row in self.rows if row.timing_option == timing]

    def mean(self, timing, value):
        for row in self.rows:
            if row.timing_option == timing and row.swept_value == value:
                return row.mean_influence
        return None

    def to_frame(self):
        return pd.DataFrame(
            [row.serialize() for row in self.rows], columns=list(ReportRow.FIELDS))

    def __eq__(self, other):
        if not isinstance(other, ReportTable):
            return NotImplemented
        return (self.rows == other.rows and self.config_hash == other.config_hash
                and self.base_seed == other.base_seed)

    def __ne__(self, other):
        result = self.__eq__(other)
        return result if result is NotImplemented else not result

    __hash__ = None

    def __str__(self):
        return "Report table with {0} rows for timing options {1}".format(
            len(self.rows), self.timing_options())


def run_replication(config_fields, replication):
    """
    Simulate every (timing, value) cell of one replication. The network is
    derived from (base_seed, replication) alone and the random target order
    from (base_seed, replication), so cells of a replication share both.
    Returns {(timing, value_index): influence or None when not converged}.
    """
    config = SweepConfig(**config_fields)
    base_seed = config.base_seed

    spec = config.network_spec.replace(seed=derive_seed(base_seed, "network", replication))
    matrix = generate_interaction_matrix(spec)
    if config.target_selection == TOP_INFLUENCE:
        order = social_influence_vector(matrix).ranking()
    else:
        order = XorShift64Star(derive_seed(base_seed, "targets", replication)).permutation(
            matrix.n)

    results = {}
    for value_index, value in enumerate(config.sweep_values):
        lam, coverage, duration = config.cell_factors(value)
        targets = select_targets(order, coverage, matrix.n)
        for timing in config.timing_options:
            if lam == 0:
                results[(timing, value_index)] = 0.0
                continue
            scenario = Scenario(
                matrix=matrix, targets=targets, lam=lam, k=duration, timing=timing,
                horizon=config.horizon, uniform_range=config.uniform_range,
                epsilon=config.epsilon, keep_full_trace=False,
                seed=derive_seed(base_seed, "schedule", timing, value, replication))
            trace = simulate(scenario)
            if trace.converged:
                results[(timing, value_index)] = measured_influence(trace)
            else:
                results[(timing, value_index)] = None

    log = "Finished replication {0} on {1}".format(replication, spec)
    LOGGER.debug(log)
    return results


def _aggregate(timing, value, influences):
    converged = [x for x in influences if x is not None]
    non_converged = len(influences) - len(converged)
    if non_converged:
        log = "{0} of {1} replications did not converge for {2} at {3}".format(
            non_converged, len(influences), timing, value)
        LOGGER.warning(log)

    if converged:
        mean = float(np.mean(converged))
        std = float(np.std(converged, ddof=1)) if len(converged) > 1 else 0.0
    else:
        mean, std = float("nan"), float("nan")

    return ReportRow(
        timing_option=timing, swept_value=value, mean_influence=mean, std_dev=std,
        replication_count=len(converged), non_converged=non_converged)


def run_sweep(config, workers=1):
    """
    Run every replication of a sweep, in a process pool when workers > 1,
    and fold the results in (timing, value, replication) order.
    """
    log = "Starting {0}".format(config)
    LOGGER.info(log)

    fields = config.serialize()
    replications = range(config.replications)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(
                run_replication, [fields] * config.replications, replications))
    else:
        results = [run_replication(fields, replication) for replication in replications]

    rows = []
    for timing in config.timing_options:
        for value_index, value in enumerate(config.sweep_values):
            influences = [result[(timing, value_index)] for result in results]
            rows.append(_aggregate(timing, value, influences))

    table = ReportTable(
        rows=rows, config_hash=config.config_hash(), base_seed=config.base_seed,
        swept_factor=config.swept_factor)
    log = "Successfully finished {0} sweep with {1} rows".format(config.swept_factor, len(rows))
    LOGGER.info(log)
    return table


class TimingComparison(object):
    """
    Per swept value: timing options ordered by mean influence, the
    consensus-start and consensus-uniform gaps, the spread across options,
    whether consensus >= uniform >= start is violated and which options had
    no converged replication. Gaps and spreads that need a missing option are
    None.
    """

    def __init__(self, rows):
        self.rows = rows

    def violations(self):
        return [row["swept_value"] for row in self.rows if row["violated"]]

    def incomplete(self):
        return [row["swept_value"] for row in self.rows if row["missing"]]

    def gaps(self, key="consensus_start_gap"):
        return [row[key] for row in self.rows]

    def spreads(self):
        return [row["spread"] for row in self.rows]

    def max_gap(self, key="consensus_start_gap"):
        values = [gap for gap in self.gaps(key) if gap is not None]
        return max(values) if values else None

    def endpoint_gaps(self, key="consensus_start_gap"):
        gaps = self.gaps(key)
        return gaps[0], gaps[-1]

    def __str__(self):
        return (
            "Timing comparison over {0} values with {1} ordering violations"
            " and {2} incomplete values"
        ).format(len(self.rows), len(self.violations()), len(self.incomplete()))


def _gap(means, first, second):
    if first in means and second in means:
        return means[first] - means[second]
    return None


def _usable_mean(table, timing, value):
    """Mean of a cell, None when absent or when no replication converged"""
    mean = table.mean(timing, value)
    if mean is None or math.isnan(mean):
        return None
    return mean


def compare_timing_options(table):
    timings = table.timing_options()
    if len(timings) < 2:
        raise InsufficientDataError(
            "Comparing timing options needs at least 2, table has {0}".format(timings))

    expected = [t for t in (CONSENSUS, UNIFORM, START) if t in timings]
    rows = []
    for value in table.swept_values():
        means = {}
        for timing in timings:
            mean = _usable_mean(table, timing, value)
            if mean is not None:
                means[timing] = mean
        missing = tuple(t for t in timings if t not in means)
        ordering = sorted(means, key=lambda timing: (-means[timing], TIMING_OPTIONS.index(timing)))
        present = [t for t in expected if t in means]
        violated = any(
            means[present[i]] + ORDER_TOL < means[present[i + 1]]
            for i in range(len(present) - 1))
        values = list(means.values())
        rows.append({
            "swept_value": value,
            "ordering": tuple(ordering),
            "consensus_start_gap": _gap(means, CONSENSUS, START),
            "consensus_uniform_gap": _gap(means, CONSENSUS, UNIFORM),
            "spread": max(values) - min(values) if not missing else None,
            "violated": violated,
            "missing": missing,
        })

    comparison = TimingComparison(rows)
    for row in comparison.rows:
        if row["missing"]:
            log = "No converged replication for {0} at {1}, left out of the comparison".format(
                list(row["missing"]), row["swept_value"])
            LOGGER.warning(log)
        if row["violated"]:
            log = "Timing order consensus >= uniform >= start violated at {0}".format(
                row["swept_value"])
            LOGGER.warning(log)
    return comparison
