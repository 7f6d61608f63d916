"""
JSON ingestion of measures and JSON (de)serialization of regions and reports.

Regions are a tagged union keyed by ``"type"``. Infinite slab bounds and
radii are written as ``null`` so the output is strict JSON.
"""
from __future__ import annotations

import json
import math
from typing import Any, Dict, List, Sequence

from .errors import InputError
from .geometry import (Annulus, Disk, HalfSpace, Hyperplane, PolyRegion, SineWave, Slab,
                       StripeWave, Wedge)
from .measure import Measure, SolveReport


def parse_measures(doc: Dict[str, Any]) -> List[Measure]:
    """Measures from ``{"dimension": d, "measures": [{"name", "points", "weights"?}]}``."""
    if not isinstance(doc, dict) or "measures" not in doc:
        raise InputError("input must be an object with a 'measures' list")
    items = doc["measures"]
    if not isinstance(items, list) or not items:
        raise InputError("'measures' must be a non-empty list")
    dim = doc.get("dimension")
    out = []
    for k, item in enumerate(items):
        if not isinstance(item, dict) or "points" not in item:
            raise InputError(f"measure {k} has no 'points'")
        try:
            m = Measure(item["points"], item.get("weights"), str(item.get("name", f"mu{k + 1}")))
        except (TypeError, ValueError) as exc:
            raise InputError(f"measure {k}: {exc}") from exc
        if dim is not None and m.dim != dim:
            raise InputError(f"measure {k} has dimension {m.dim}, expected {dim}")
        out.append(m)
    if len({m.dim for m in out}) != 1:
        raise InputError("measures have different dimensions")
    return out


def load_measures(path) -> List[Measure]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
    return parse_measures(doc)


def measures_to_dict(measures: Sequence[Measure]) -> Dict[str, Any]:
    return {"dimension": measures[0].dim,
            "measures": [{"name": m.name, "points": m.points.tolist(),
                          "weights": m.weights.tolist()} for m in measures]}


def _num(x: float):
    return None if math.isinf(x) else float(x)


def _inf(x, default: float) -> float:
    return default if x is None else float(x)


def _plane(h: Hyperplane) -> Dict[str, Any]:
    return {"normal": list(h.normal), "offset": h.offset}


def _halfspace(h: HalfSpace) -> Dict[str, Any]:
    return {"type": "halfspace", "normal": list(h.plane.normal), "offset": h.plane.offset,
            "side": h.side}


def region_to_dict(region) -> Dict[str, Any]:
    if isinstance(region, Hyperplane):
        return {"type": "hyperplane", **_plane(region)}
    if isinstance(region, HalfSpace):
        return _halfspace(region)
    if isinstance(region, Slab):
        return {"type": "slab", "direction": list(region.direction),
                "lo": _num(region.lo), "hi": _num(region.hi)}
    if isinstance(region, Wedge):
        return {"type": "wedge", "halfspaces": [_halfspace(h) for h in region.halfspaces]}
    if isinstance(region, Annulus):
        return {"type": "annulus", "center": list(region.center),
                "r_in": region.r_in, "r_out": _num(region.r_out)}
    if isinstance(region, Disk):
        return {"type": "disk", "center": list(region.center), "radius": region.radius,
                "inside": region.inside}
    if isinstance(region, SineWave):
        return {"type": "sine", "period": region.period, "amplitude": region.amplitude,
                "phase": region.phase, "midline": region.midline, "above": region.above}
    if isinstance(region, StripeWave):
        return {"type": "stripe", "period": region.period, "x0": region.x0, "x1": region.x1}
    if isinstance(region, PolyRegion):
        out = {"type": "polyregion", "halfspaces": [_halfspace(h) for h in region.halfspaces]}
        if region.vertices is not None:
            out["vertices"] = [list(v) for v in region.vertices]
        return out
    raise InputError(f"cannot serialize region of type {type(region).__name__}")


def _halfspace_from(d) -> HalfSpace:
    return HalfSpace(Hyperplane(tuple(d["normal"]), float(d["offset"])), int(d.get("side", 1)))


def region_from_dict(d: Dict[str, Any]):
    try:
        kind = d["type"]
        if kind == "hyperplane":
            return Hyperplane(tuple(d["normal"]), float(d["offset"]))
        if kind == "halfspace":
            return _halfspace_from(d)
        if kind == "slab":
            return Slab(tuple(d["direction"]), _inf(d["lo"], -math.inf), _inf(d["hi"], math.inf))
        if kind == "wedge":
            return Wedge(tuple(_halfspace_from(h) for h in d["halfspaces"]))
        if kind == "annulus":
            return Annulus(tuple(d["center"]), float(d["r_in"]), _inf(d["r_out"], math.inf))
        if kind == "disk":
            return Disk(tuple(d["center"]), float(d["radius"]), bool(d.get("inside", True)))
        if kind == "sine":
            return SineWave(float(d["period"]), float(d["amplitude"]), float(d["phase"]),
                            float(d["midline"]), bool(d.get("above", False)))
        if kind == "stripe":
            return StripeWave(float(d["period"]), float(d["x0"]), float(d["x1"]))
        if kind == "polyregion":
            verts = d.get("vertices")
            return PolyRegion(tuple(_halfspace_from(h) for h in d["halfspaces"]),
                              None if verts is None else tuple(tuple(v) for v in verts))
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed region: {exc}") from exc
    raise InputError(f"unknown region type {d.get('type')!r}")


def report_to_dict(report: SolveReport, fractions=None) -> Dict[str, Any]:
    if fractions is None:
        fractions = report.extra.get("fractions")
    out = {"solver": report.solver, "converged": bool(report.converged),
           "residuals": [float(r) for r in report.residuals],
           "region": region_to_dict(report.region), "seed": int(report.seed),
           "tol": float(report.tol), "iterations": int(report.iterations),
           "restarts": int(report.restarts)}
    if fractions is not None:
        out["fractions"] = [float(a) for a in fractions]
    return out


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, allow_nan=False)
        fh.write("\n")
