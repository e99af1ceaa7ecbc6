"""Line-based presentation files.

::

    rgp v1
    model=standard
    n=2
    k=3
    d=3/5
    seed=42
    relators:
    1,2,-1
    ...

``model``, ``d`` and ``seed`` appear together or not at all; relators are
comma-separated signed 1-based generator indices, one per line.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .presentation import ModelParams, Presentation

MAGIC = "rgp v1"
HEADER_KEYS = ("model", "n", "k", "d", "seed")


class FormatError(ValueError):
    def __init__(self, line: int, msg: str):
        super().__init__(f"line {line}: {msg}")
        self.line = line


class ValidationError(ValueError):
    pass


def encode(P: Presentation) -> str:
    lines = [MAGIC]
    if P.params is not None:
        p = P.params
        lines += [f"model={p.model}", f"n={P.n}", f"k={P.k}",
                  f"d={p.d.numerator}/{p.d.denominator}", f"seed={p.seed}"]
    else:
        lines += [f"n={P.n}", f"k={P.k}"]
    lines.append("relators:")
    lines += [",".join(str(int(x)) for x in row) for row in P.relators.tolist()]
    return "\n".join(lines) + "\n"


def decode(text: str, validate: bool = True) -> Presentation:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].strip() != MAGIC:
        raise FormatError(1, f"expected {MAGIC!r} header")
    header: dict[str, str] = {}
    i = 1
    while True:
        if i >= len(lines):
            raise FormatError(i, "missing 'relators:' line")
        line = lines[i].strip()
        i += 1
        if line == "relators:":
            break
        key, sep, value = line.partition("=")
        if not sep or key not in HEADER_KEYS:
            raise FormatError(i, f"expected key=value with key in {HEADER_KEYS}, got {line!r}")
        if key in header:
            raise FormatError(i, f"duplicate key {key!r}")
        header[key] = value.strip()
    try:
        n, k = int(header["n"]), int(header["k"])
    except KeyError as e:
        raise FormatError(i, f"missing header key {e.args[0]!r}") from None
    except ValueError as e:
        raise FormatError(i, f"bad integer in header: {e}") from None
    meta = [key for key in ("model", "d", "seed") if key in header]
    params = None
    if meta:
        if len(meta) != 3:
            raise FormatError(i, "model, d and seed must be given together")
        try:
            d = Fraction(header["d"])
            params = ModelParams(header["model"], n, k, d, int(header["seed"]))
        except (ValueError, ZeroDivisionError) as e:
            raise FormatError(i, f"bad model metadata: {e}") from None
    rows = []
    for j in range(i, len(lines)):
        line = lines[j].strip()
        try:
            row = tuple(int(x) for x in line.split(","))
        except ValueError:
            raise FormatError(j + 1, f"bad relator line {line!r}") from None
        if len(row) != k:
            raise ValidationError(f"line {j + 1}: relator has length {len(row)}, expected k={k}")
        if any(x == 0 or abs(x) > n for x in row):
            raise ValidationError(f"line {j + 1}: letters must be nonzero with |letter| <= n={n}")
        rows.append(row)
    P = Presentation(n=n, relators=rows, k=k, params=params)
    if validate:
        try:
            P.validate()
        except ValueError as e:
            raise ValidationError(str(e)) from None
    return P


def read_presentation(path, validate: bool = True) -> Presentation:
    return decode(Path(path).read_text(encoding="utf-8"), validate=validate)


def write_presentation(P: Presentation, path) -> None:
    Path(path).write_text(encode(P), encoding="utf-8")
