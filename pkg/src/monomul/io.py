"""JSON and CSV formats for measures, generators and results."""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Sequence

import numpy as np

from .measures import CIRCLE, DOMAINS, HAAR, HALF_LINE, AtomicMeasure, HaarMeasure, Measure
from .semigroup import GeneratorCircle, GeneratorHalfLine


def fmt(x: float) -> str:
    """17 significant digits: lossless for doubles."""
    return format(float(x), ".17g")


def measure_to_dict(mu: Measure) -> dict:
    if isinstance(mu, HaarMeasure):
        return {"domain": CIRCLE, "haar": True}
    return {
        "domain": mu.domain,
        "atoms": [{"position": float(p), "weight": float(w)} for p, w in mu.atoms],
    }


def measure_from_dict(data: dict) -> Measure:
    try:
        domain = data["domain"]
    except (KeyError, TypeError):
        raise ValueError("measure JSON needs a 'domain' field") from None
    if domain not in DOMAINS:
        raise ValueError(f"unknown domain {domain!r}")
    if data.get("haar"):
        if domain != CIRCLE:
            raise ValueError("Haar measure lives on the circle")
        return HAAR
    atoms = data.get("atoms")
    if not atoms:
        raise ValueError("measure JSON needs a nonempty 'atoms' list or \"haar\": true")
    pos = [float(a["position"]) for a in atoms]
    w = np.array([float(a["weight"]) for a in atoms])
    return AtomicMeasure(domain, pos, w)


def read_measure(path: str) -> Measure:
    with open(path) as fh:
        return measure_from_dict(json.load(fh))


def dumps(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def generator_from_dict(data: dict):
    domain = data.get("domain")
    if domain == HALF_LINE:
        nu = data.get("nu", [])
        return GeneratorHalfLine(
            float(data.get("a", 0.0)),
            [float(x["position"]) for x in nu],
            [float(x["weight"]) for x in nu],
        )
    if domain == CIRCLE:
        if "builtin" in data:
            if data["builtin"] != "z^n-1":
                raise ValueError(f"unknown builtin generator {data['builtin']!r}")
            return GeneratorCircle.power(int(data["n"]))
        rho = data.get("rho", [])
        return GeneratorCircle(
            float(data.get("beta", 0.0)),
            [float(x["angle"]) for x in rho],
            [float(x["weight"]) for x in rho],
        )
    raise ValueError(f"generator JSON has unknown domain {domain!r}")


def read_generator(path: str):
    with open(path) as fh:
        return generator_from_dict(json.load(fh))


def write_rows(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def moments_rows(moments: np.ndarray, *prefix):
    for n, m in enumerate(moments, start=1):
        yield (*prefix, n, float(m.real), float(m.imag))


def density_csv(grid, values) -> str:
    return write_rows(["t_or_theta", "density"],
                      ((float(t), float(d)) for t, d in zip(grid, values)))
