"""Instrument JSON files and region CSV files.

Instrument file::

    {
      "kind": "lueders" | "purity_preserving" | "measure_prepare",
      "elements": [{"p": 0.25, "k": 1.0, "n": [0.707, 0, 0.707]}, ...],
      "unitaries": [{"axis": [0, 1, 0], "angle": 0.3}, ...],      # purity_preserving
      "prepared_states": [[1, 0, 0], ...],                        # measure_prepare
      "correction": [{"type": "identity"},
                     {"type": "rotate", "axis": [0, 1, 0], "angle": 0.1},
                     {"type": "prepare", "bloch": [1, 0, 0]}]     # optional
    }

Region CSV: header ``x,y,kind,meta``, one point per row, LF line endings.
"""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

from . import qmodel as qm
from .errors import InvalidPovm, NotPsd, ParseError
from .regions import KINDS, RegionPoint

KINDS_INSTRUMENT = ("lueders", "purity_preserving", "measure_prepare")
CSV_HEADER = ["x", "y", "kind", "meta"]


# --------------------------------------------------------------------------
# instrument files


def _number(obj, field: str) -> float:
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ParseError(f"expected a number, got {obj!r}", field)
    if not math.isfinite(obj):
        raise ParseError("number is not finite", field)
    return float(obj)


def _vector(obj, field: str) -> list[float]:
    if not isinstance(obj, list) or len(obj) != 3:
        raise ParseError(f"expected a list of three numbers, got {obj!r}", field)
    return [_number(v, f"{field}[{i}]") for i, v in enumerate(obj)]


def _rotation(obj, field: str) -> qm.Rotation:
    if not isinstance(obj, dict):
        raise ParseError("expected an object with 'axis' and 'angle'", field)
    for key in ("axis", "angle"):
        if key not in obj:
            raise ParseError(f"missing '{key}'", field)
    ax = _vector(obj["axis"], f"{field}.axis")
    if qm.norm(ax) == 0.0:
        raise ParseError("rotation axis is zero", f"{field}.axis")
    return qm.Rotation(ax, _number(obj["angle"], f"{field}.angle"))


def _state(obj, field: str) -> qm.State:
    r = _vector(obj, field)
    try:
        return qm.State(r)
    except NotPsd as exc:
        raise InvalidPovm(f"{field}: {exc}") from None


def _correction(obj, n: int) -> qm.Correction:
    if not isinstance(obj, list):
        raise ParseError("expected a list", "correction")
    if len(obj) != n:
        raise ParseError(f"expected {n} entries, got {len(obj)}", "correction")
    ops = []
    for i, entry in enumerate(obj):
        field = f"correction[{i}]"
        if not isinstance(entry, dict) or "type" not in entry:
            raise ParseError("expected an object with a 'type'", field)
        kind = entry["type"]
        if kind == "identity":
            ops.append(qm.IdentityMap())
        elif kind == "rotate":
            ops.append(qm.Rotate(_rotation(entry, field)))
        elif kind == "prepare":
            if "bloch" not in entry:
                raise ParseError("missing 'bloch'", field)
            ops.append(qm.Prepare(_state(entry["bloch"], f"{field}.bloch")))
        else:
            raise ParseError(f"unknown correction type {kind!r}", f"{field}.type")
    return qm.Correction(tuple(ops))


def instrument_from_dict(data) -> tuple[qm.Instrument, qm.Correction | None]:
    if not isinstance(data, dict):
        raise ParseError("top level must be an object", "$")
    kind = data.get("kind")
    if kind not in KINDS_INSTRUMENT:
        raise ParseError(f"expected one of {KINDS_INSTRUMENT}, got {kind!r}", "kind")
    elements = data.get("elements")
    if not isinstance(elements, list) or not elements:
        raise ParseError("expected a non-empty list", "elements")
    ops = []
    for i, el in enumerate(elements):
        field = f"elements[{i}]"
        if not isinstance(el, dict):
            raise ParseError("expected an object with 'p', 'k', 'n'", field)
        for key in ("p", "k", "n"):
            if key not in el:
                raise ParseError(f"missing '{key}'", field)
        p = _number(el["p"], f"{field}.p")
        k = _number(el["k"], f"{field}.k")
        n = _vector(el["n"], f"{field}.n")
        if p < 0 or abs(k) > 1 + qm.PSD_TOL:
            raise InvalidPovm(f"{field}: need p >= 0 and |k| <= 1")
        if p > 0 and k != 0 and qm.norm(n) == 0.0:
            raise ParseError("direction is zero", f"{field}.n")
        ops.append(qm.HermitianOp.from_pkn(p, k, n) if qm.norm(n) else qm.HermitianOp(p, [0, 0, 0]))
    povm = qm.Povm(tuple(ops))
    report = qm.validate(povm)
    if not report.valid:
        raise InvalidPovm(
            f"elements do not form a POVM (residual {report.residual:.3g}, "
            f"non-PSD {list(report.psd_failures)})"
        )
    n = len(povm)
    if kind == "lueders":
        inst = qm.Instrument.lueders(povm)
    elif kind == "purity_preserving":
        rots = data.get("unitaries")
        if not isinstance(rots, list) or len(rots) != n:
            raise ParseError(f"expected a list of {n} rotations", "unitaries")
        inst = qm.Instrument.purity_preserving(
            povm, [_rotation(r, f"unitaries[{i}]") for i, r in enumerate(rots)]
        )
    else:
        states = data.get("prepared_states")
        if not isinstance(states, list) or len(states) != n:
            raise ParseError(f"expected a list of {n} Bloch vectors", "prepared_states")
        inst = qm.Instrument.measure_prepare(
            povm, [_state(s, f"prepared_states[{i}]") for i, s in enumerate(states)]
        )
    corr = _correction(data["correction"], n) if data.get("correction") is not None else None
    return inst, corr


def load_instrument(path) -> tuple[qm.Instrument, qm.Correction | None]:
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return instrument_from_dict(data)


def _rotation_dict(rot: qm.Rotation) -> dict:
    return {"axis": rot.axis.tolist(), "angle": rot.angle}


def instrument_to_dict(inst: qm.Instrument, corr: qm.Correction | None = None) -> dict:
    elements = []
    for p, k, n in inst.povm.pkn():
        elements.append({"p": p, "k": k, "n": n.tolist()})
    upd = inst.update
    if isinstance(upd, qm.Lueders):
        out = {"kind": "lueders", "elements": elements}
    elif isinstance(upd, qm.PurityPreserving):
        out = {
            "kind": "purity_preserving",
            "elements": elements,
            "unitaries": [_rotation_dict(r) for r in upd.rotations],
        }
    elif isinstance(upd, qm.MeasurePrepare):
        out = {
            "kind": "measure_prepare",
            "elements": elements,
            "prepared_states": [s.r.tolist() for s in upd.states],
        }
    else:
        raise ValueError("Kraus instruments have no file representation")
    if corr is not None:
        entries = []
        for op in corr.ops:
            if isinstance(op, qm.IdentityMap):
                entries.append({"type": "identity"})
            elif isinstance(op, qm.Rotate):
                entries.append({"type": "rotate", **_rotation_dict(op.rotation)})
            else:
                entries.append({"type": "prepare", "bloch": op.state.r.tolist()})
        out["correction"] = entries
    return out


def dump_instrument(path, inst: qm.Instrument, corr: qm.Correction | None = None) -> None:
    Path(path).write_text(json.dumps(instrument_to_dict(inst, corr), indent=2) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# region CSV


def region_csv_text(points) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for p in points:
        w.writerow([repr(float(p.x)), repr(float(p.y)), p.kind, p.meta])
    return buf.getvalue()


def write_region_csv(path, points) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(region_csv_text(points))


def read_region_csv(path) -> list[RegionPoint]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != CSV_HEADER:
        raise ParseError(f"expected header {','.join(CSV_HEADER)}", f"{path}:1")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 4:
            raise ParseError(f"expected 4 columns, got {len(row)}", f"{path}:{lineno}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            raise ParseError("x and y must be numbers", f"{path}:{lineno}") from None
        if row[2] not in KINDS:
            raise ParseError(f"unknown kind {row[2]!r}", f"{path}:{lineno}")
        out.append(RegionPoint(x, y, row[2], row[3]))
    return out
