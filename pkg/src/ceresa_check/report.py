"""Certificate serialisation: JSON (one object per line) and CSV rows."""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable

from .numeric import SeriesValue
from .volume import INCONCLUSIVE, NONTRIVIAL, Certificate, Curve

CSV_COLUMNS = ("N", "k", "value", "frac_distance", "abs_error", "verdict", "seconds", "notes")
_PATHS_PREFIX = "eval_paths="


def _num(x) -> float:
    # floats serialise through repr, which is the shortest round-tripping form
    return float(x)


def to_dict(cert: Certificate) -> dict:
    return {
        "curve": {"type": cert.curve.kind, "n": cert.curve.n, "m": cert.curve.m},
        "k": cert.k,
        "value": _num(cert.value.value),
        "abs_error": _num(cert.value.abs_error),
        "frac_distance": _num(cert.frac_distance),
        "verdict": cert.verdict,
        "h_terms": [
            {"h": h, "value": _num(sv.value), "abs_error": _num(sv.abs_error)}
            for h, sv in cert.h_terms
        ],
        "notes": list(cert.notes),
    }


def to_json(cert: Certificate) -> str:
    return json.dumps(to_dict(cert), allow_nan=False)


def from_dict(d: dict) -> Certificate:
    c = d["curve"]
    paths = frozenset({"closed_form"})
    for note in d["notes"]:
        if note.startswith(_PATHS_PREFIX):
            paths = frozenset(note[len(_PATHS_PREFIX):].split(","))
    return Certificate(
        curve=Curve(c["type"], c["n"], c["m"]),
        k=d["k"],
        value=SeriesValue(d["value"], d["abs_error"]),
        frac_distance=d["frac_distance"],
        verdict=d["verdict"],
        h_terms=tuple((t["h"], SeriesValue(t["value"], t["abs_error"])) for t in d["h_terms"]),
        eval_paths=paths,
        notes=tuple(d["notes"]),
    )


def from_json(text: str) -> Certificate:
    return from_dict(json.loads(text))


def flag_notes(notes: Iterable[str]) -> list[str]:
    """Notes worth a CSV cell: caveats and failures, not the fixed boilerplate."""
    return [n for n in notes if not n.startswith(("informational:", _PATHS_PREFIX))]


def csv_row(cert: Certificate, seconds: float | None = None) -> list[str]:
    return [
        str(cert.curve.n),
        str(cert.k),
        repr(_num(cert.value.value)),
        repr(_num(cert.frac_distance)),
        repr(_num(cert.value.abs_error)),
        cert.verdict,
        "" if seconds is None else f"{seconds:.3f}",
        "; ".join(flag_notes(cert.notes)),
    ]


def failure_row(n: int, k: int, message: str, seconds: float | None = None) -> list[str]:
    return [str(n), str(k), "", "", "", INCONCLUSIVE, "" if seconds is None else f"{seconds:.3f}", message]


def failure_dict(curve: Curve, k: int, message: str) -> dict:
    return {
        "curve": {"type": curve.kind, "n": curve.n, "m": curve.m},
        "k": k,
        "value": None,
        "abs_error": None,
        "frac_distance": None,
        "verdict": INCONCLUSIVE,
        "h_terms": [],
        "notes": [message],
    }


def format_csv(rows: Iterable[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def human(cert: Certificate) -> str:
    lines = [
        f"{cert.curve} k={cert.k}: {cert.verdict}",
        f"  value         {_num(cert.value.value)!r} +/- {_num(cert.value.abs_error):.3g}",
        f"  frac_distance {_num(cert.frac_distance)!r}",
    ]
    for h, sv in cert.h_terms:
        lines.append(f"  h={h:<4d} {_num(sv.value)!r} +/- {_num(sv.abs_error):.3g}")
    lines.extend(f"  note: {n}" for n in cert.notes)
    return "\n".join(lines)


def summary(verdicts: Iterable[str]) -> str:
    vs = list(verdicts)
    return (
        f"summary: rows={len(vs)} {NONTRIVIAL}={vs.count(NONTRIVIAL)} "
        f"{INCONCLUSIVE}={vs.count(INCONCLUSIVE)}"
    )
