# meanfield/parsers.py
"""Plain-text measure files: one `weight intensity` pair per line, `#` starts a comment."""
import math
import re
from pathlib import Path
from typing import List, Tuple

from pydantic import ValidationError

from .errors import ParameterError
from .schemas import DiscreteMeasure

NUM = r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?"
PAIR = re.compile(rf"^\s*({NUM})\s*[,;\s]\s*({NUM})\s*$")


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _to_float(s: str, lineno: int) -> float:
    try:
        x = float(s)
    except ValueError:
        raise ParameterError("not a number", line=lineno, text=s)
    if not math.isfinite(x):
        raise ParameterError("non-finite value", line=lineno, text=s)
    return x


def parse_measure_pairs(text: str) -> List[Tuple[float, float]]:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw)
        if not line:
            continue
        m = PAIR.match(line)
        if not m:
            raise ParameterError("expected 'weight intensity'", line=lineno, text=raw.rstrip())
        pairs.append((_to_float(m.group(1), lineno), _to_float(m.group(2), lineno)))
    return pairs


def parse_measure_text(text: str) -> DiscreteMeasure:
    pairs = parse_measure_pairs(text)
    if not pairs:
        raise ParameterError("measure file has no atoms")
    try:
        return DiscreteMeasure(atoms=[{"weight": w, "intensity": g} for w, g in pairs])
    except ValidationError as e:
        raise ParameterError("invalid measure", errors=[err["msg"] for err in e.errors()])


def parse_measure_file(path) -> DiscreteMeasure:
    p = Path(path)
    if not p.is_file():
        raise ParameterError("measure file not found", path=str(p))
    return parse_measure_text(p.read_text(encoding="utf-8"))
