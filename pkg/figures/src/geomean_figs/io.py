"""Readers for the solver CLI's file formats.

This package deliberately does not import the solver; it consumes the
documented interchange formats (sample CSV, instance JSON, experiment-record
JSON) and re-evaluates nothing beyond the plotted objective surface.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass

import numpy as np


class FigureInputError(ValueError):
    pass


@dataclass(frozen=True)
class SampleTable:
    """Rows of (unit vector, objective value) parsed from a sample CSV."""

    points: np.ndarray  # (rows, n) float
    values: np.ndarray  # (rows,)

    @property
    def n(self) -> int:
        return self.points.shape[1]


def read_sample_csv(path: str) -> SampleTable:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FigureInputError(f"{path}: empty CSV")
        if header[-1] != "value" or len(header) < 2:
            raise FigureInputError(f"{path}: expected coordinate columns plus 'value'")
        if any(h.startswith("re_") or h.startswith("im_") for h in header):
            raise FigureInputError(f"{path}: complex samples cannot be drawn on the sphere map")
        rows = [[float(v) for v in row] for row in reader if row]
    if not rows:
        raise FigureInputError(f"{path}: no data rows")
    arr = np.array(rows)
    points, values = arr[:, :-1], arr[:, -1]
    norms = np.linalg.norm(points, axis=1)
    if np.max(np.abs(norms - 1.0)) > 1e-6:
        raise FigureInputError(f"{path}: sample norms deviate from 1 by {np.max(np.abs(norms-1)):.2e}")
    return SampleTable(points=points, values=values)


@dataclass(frozen=True)
class InstanceSurface:
    """Just enough of an instance file to draw objective contours."""

    n: int
    forms: np.ndarray  # (d, n, n) real

    def geometric_mean(self, xs: np.ndarray) -> np.ndarray:
        vals = np.einsum("sa,dab,sb->ds", xs, self.forms, xs)
        out = np.zeros(xs.shape[0])
        ok = np.all(vals > 0.0, axis=0)
        if np.any(ok):
            out[ok] = np.exp(np.mean(np.log(vals[:, ok]), axis=0))
        return out


def read_instance(path: str) -> InstanceSurface:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("field") != "real":
        raise FigureInputError(f"{path}: sphere maps need a real instance, got field {doc.get('field')}")
    n = int(doc["n"])
    forms = np.array([np.array(f["re"], dtype=float) for f in doc["forms"]])
    if forms.shape[1:] != (n, n):
        raise FigureInputError(f"{path}: form shapes {forms.shape[1:]} do not match n={n}")
    return InstanceSurface(n=n, forms=forms)


def read_record(path: str) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if "experiment" not in doc:
        raise FigureInputError(f"{path}: not an experiment record")
    return doc
