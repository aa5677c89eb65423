"""Reading and writing X-states as JSON / JSON lines / CSV.

JSON form::

    {"d": [d1, d2, d3, d4], "c14": {"re": .., "im": ..}, "c23": {"re": .., "im": ..}}

CSV row form: ``d1,d2,d3,d4,c14re,c14im,c23re,c23im`` (an optional header
line with exactly these names is skipped; ``#`` lines are comments).
JSON records of the form ``{"record": "header", ...}``, as written by the
command-line tool, are skipped.
"""

from __future__ import annotations

import csv
import io
import json
from typing import Iterable, TextIO

from ._tolerances import DEFAULT_TOLERANCES, Tolerances
from .state import ROW_FIELDS, XState, XStateError, make_xstate

__all__ = [
    "StateFileError",
    "xstate_from_json",
    "read_states",
    "parse_states",
    "write_states_csv",
    "write_states_jsonl",
]


class StateFileError(ValueError):
    """Malformed state input; ``lineno`` is 1-based."""

    def __init__(self, message: str, lineno: int | None = None):
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(where + message)
        self.lineno = lineno


def _complex(obj, name) -> complex:
    if obj is None:
        return 0j
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, dict) and set(obj) <= {"re", "im"}:
        return complex(float(obj.get("re", 0.0)), float(obj.get("im", 0.0)))
    raise XStateError(f"{name} must be a number or {{'re': .., 'im': ..}}, got {obj!r}")


def xstate_from_json(obj: dict, tol: Tolerances = DEFAULT_TOLERANCES) -> XState:
    if not isinstance(obj, dict) or "d" not in obj:
        raise XStateError("state object needs a 'd' field with four diagonal entries")
    unknown = set(obj) - {"d", "c14", "c23"}
    if unknown:
        raise XStateError(f"unknown fields {sorted(unknown)}")
    d = obj["d"]
    if not isinstance(d, list) or len(d) != 4:
        raise XStateError("'d' must be a list of four numbers")
    return make_xstate([float(v) for v in d], _complex(obj.get("c14"), "c14"),
                       _complex(obj.get("c23"), "c23"), tol)


def _is_header(obj) -> bool:
    return isinstance(obj, dict) and obj.get("record") == "header"


def _sniff(text: str) -> str:
    for line in text.splitlines():
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        return "json" if s[0] in "{[" else "csv"
    return "csv"


def _parse_json(text: str, tol: Tolerances) -> list[XState]:
    stripped = text.strip()
    if stripped.startswith("["):
        try:
            data = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise StateFileError(exc.msg, exc.lineno) from exc
        if not isinstance(data, list):
            raise StateFileError("expected a JSON array of states", 1)
        out = []
        for i, obj in enumerate(data):
            if _is_header(obj):
                continue
            try:
                out.append(xstate_from_json(obj, tol))
            except (XStateError, TypeError, ValueError) as exc:
                raise StateFileError(f"array item {i}: {exc}") from exc
        return out
    # JSON lines; a single pretty-printed object is accepted too
    try:
        obj = json.loads(stripped)
        return [] if _is_header(obj) else [xstate_from_json(obj, tol)]
    except json.JSONDecodeError:
        pass
    except (XStateError, TypeError, ValueError) as exc:
        raise StateFileError(str(exc), 1) from exc
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        try:
            obj = json.loads(s)
            if not _is_header(obj):
                out.append(xstate_from_json(obj, tol))
        except json.JSONDecodeError as exc:
            raise StateFileError(f"invalid JSON: {exc.msg}", lineno) from exc
        except (XStateError, TypeError, ValueError) as exc:
            raise StateFileError(str(exc), lineno) from exc
    return out


def _parse_csv(text: str, tol: Tolerances) -> list[XState]:
    out = []
    reader = csv.reader(io.StringIO(text))
    for fields in reader:
        lineno = reader.line_num
        if not fields or not "".join(fields).strip() or fields[0].lstrip().startswith("#"):
            continue
        fields = [f.strip() for f in fields]
        if tuple(fields) == ROW_FIELDS:
            continue
        if len(fields) != 8:
            raise StateFileError(f"expected 8 comma-separated values, got {len(fields)}", lineno)
        try:
            v = [float(f) for f in fields]
        except ValueError as exc:
            raise StateFileError(f"non-numeric value: {exc}", lineno) from exc
        try:
            out.append(make_xstate(v[:4], complex(v[4], v[5]), complex(v[6], v[7]), tol))
        except XStateError as exc:
            raise StateFileError(str(exc), lineno) from exc
    return out


def parse_states(text: str, fmt: str | None = None,
                 tol: Tolerances = DEFAULT_TOLERANCES) -> list[XState]:
    """Parse states from text; ``fmt`` is ``"json"``, ``"csv"`` or None to sniff."""
    fmt = fmt or _sniff(text)
    if fmt in ("json", "jsonl"):
        return _parse_json(text, tol)
    if fmt == "csv":
        return _parse_csv(text, tol)
    raise ValueError(f"unknown state format {fmt!r}")


def read_states(stream: TextIO, fmt: str | None = None,
                tol: Tolerances = DEFAULT_TOLERANCES) -> list[XState]:
    return parse_states(stream.read(), fmt, tol)


def write_states_csv(states: Iterable[XState], stream: TextIO, header: bool = True):
    if header:
        stream.write(",".join(ROW_FIELDS) + "\n")
    for s in states:
        stream.write(",".join(repr(float(v)) for v in s.to_row()) + "\n")


def write_states_jsonl(states: Iterable[XState], stream: TextIO):
    for s in states:
        stream.write(json.dumps(s.to_json()) + "\n")
