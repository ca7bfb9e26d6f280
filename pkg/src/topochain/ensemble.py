"""Disorder-ensemble orchestration: run every realization, aggregate deterministically."""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Any, Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import EnsembleError, TopochainError, ValidationError
from .model import DisorderSpec

Experiment = Callable[[DisorderSpec, int], Any]


@dataclass(frozen=True)
class EnsembleReport:
    """Per-sample outputs stacked on axis 0, their mean and standard error."""

    samples: np.ndarray
    mean: np.ndarray
    stderr: np.ndarray
    manifest: dict

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]


def aggregate(samples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error over axis 0.

    Points where every sample agrees exactly get that value as the mean and an
    exact zero error, so clean ensembles reproduce the single clean run.
    """
    samples = np.asarray(samples, dtype=float)
    n = samples.shape[0]
    mean = np.mean(samples, axis=0)
    if n > 1:
        stderr = np.std(samples, axis=0, ddof=1) / np.sqrt(n)
    else:
        stderr = np.zeros_like(mean)
    same = np.all(samples == samples[0], axis=0)
    mean = np.where(same, samples[0], mean)
    stderr = np.where(same, 0.0, stderr)
    return mean, stderr


def run_ensemble(
    experiment: Experiment,
    disorder: DisorderSpec,
    executor=None,
) -> EnsembleReport:
    """Evaluate ``experiment(disorder, i)`` for ``i in range(disorder.samples)``.

    Results are placed by sample index, so an ``executor`` (anything with a
    ``map`` method, e.g. a ``concurrent.futures`` pool) may run them in any
    order without changing the report. A failing sample raises EnsembleError
    naming its index.
    """

    def one(i):
        try:
            return np.asarray(experiment(disorder, i), dtype=float)
        except EnsembleError:
            raise
        except Exception as exc:
            raise EnsembleError(i, exc) from exc

    indices = range(disorder.samples)
    outputs = list(executor.map(one, indices)) if executor is not None else [one(i) for i in indices]
    samples = np.stack(outputs)
    mean, stderr = aggregate(samples)
    return EnsembleReport(samples, mean, stderr, disorder.manifest())


def sweep(
    experiment: Callable[..., Any],
    grid: Sequence[Mapping[str, Any]],
    disorder: DisorderSpec,
    executor=None,
) -> list[tuple[dict, EnsembleReport]]:
    """One ensemble per grid point, in grid order.

    ``experiment(disorder, sample_index, **point)`` is called for each point. A
    point may carry ``W``; it replaces the disorder strength for that point
    while seed and sample count stay fixed.
    """
    if len(grid) == 0:
        raise ValidationError("sweep grid is empty")
    table = []
    for point in grid:
        params = {k: v for k, v in point.items() if k != "W"}
        dis = replace(disorder, W=point["W"]) if "W" in point else disorder

        def bound(d, i, _params=params):
            return experiment(d, i, **_params)

        table.append((dict(point), run_ensemble(bound, dis, executor=executor)))
    return table


def unwrap(exc: BaseException) -> BaseException:
    """Innermost package error behind an EnsembleError chain."""
    while isinstance(exc, EnsembleError) and isinstance(exc.cause, TopochainError):
        exc = exc.cause
    return exc


def grid_product(**axes: Iterable[Any]) -> list[dict]:
    """Cartesian grid as a list of dicts, last axis varying fastest."""
    points: list[dict] = [{}]
    for name, values in axes.items():
        points = [{**p, name: v} for p in points for v in values]
    return points
