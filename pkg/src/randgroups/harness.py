"""Per-presentation verdicts and reproducible parameter sweeps."""

from __future__ import annotations

import csv
import io
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from pathlib import Path
from typing import Iterator, Optional

from .analysis import (
    AbelianInvariants,
    abelianization,
    almost_positive_exists,
    euler_characteristic,
    has_repeated_letter,
    not_free_advisory,
    positive_count,
)
from .collapse import CertificateError, collapse_certificate
from .freeness import AllTrees, antipodal_graph, freeness_certificate, hypergraphs_all_trees
from .presentation import MODELS, ModelParams, Presentation, parse_density
from .sampler import sample
from .seeding import trial_seed
from .smallcancel import default_epsilon, isoperimetric_target, piece_spectrum

COLUMNS = [
    "model", "n", "k", "d", "seed", "trial", "N",
    "collapse", "collapse_m", "exact_type", "free", "free_rank",
    "positive_count", "almost_positive", "repeated_letters", "max_piece",
    "cprime_pass", "two_face_pass", "euler_char", "not_free_advisory", "elapsed_ms",
    "error",
]


@dataclass(frozen=True)
class AnalysisOptions:
    witnesses: bool = False
    piece_spectrum: bool = True
    lam: Fraction = Fraction(1, 6)
    eps: Optional[Fraction] = None          # None: (1 - 2d) / 8
    require_spanning: bool = False
    require_no_repeats: bool = True
    fallback_tietze: bool = True


@dataclass
class TrialVerdict:
    model: Optional[str]
    n: int
    k: int
    d: Optional[Fraction]
    seed: Optional[int]
    trial: Optional[int]
    N: Optional[int]
    collapse: Optional[bool] = None
    collapse_m: Optional[int] = None
    exact_type: Optional[str] = None
    free: Optional[bool] = None
    free_rank: Optional[int] = None
    positive_count: Optional[int] = None
    almost_positive: Optional[bool] = None
    repeated_letters: Optional[bool] = None
    max_piece: Optional[int] = None
    cprime_pass: Optional[bool] = None
    two_face_pass: Optional[bool] = None
    euler_char: Optional[int] = None
    not_free_advisory: Optional[bool] = None
    elapsed_ms: Optional[float] = None
    error: Optional[str] = None
    abelianization: Optional[AbelianInvariants] = field(default=None, repr=False)
    certificates: dict = field(default_factory=dict, repr=False)

    @property
    def verdict(self) -> str:
        if self.collapse:
            return f"cyclic({self.abelianization.order})"
        if self.free:
            return f"free({self.free_rank})"
        return "undetermined"

    def row(self) -> list[str]:
        return [_cell(getattr(self, c)) for c in COLUMNS]

    def to_json(self) -> dict:
        out = {"verdict": self.verdict}
        for c in COLUMNS:
            v = getattr(self, c)
            out[c] = str(v) if isinstance(v, Fraction) else v
        if self.abelianization is not None:
            out["abelianization"] = self.abelianization.to_json()
        out["certificates"] = self.certificates
        return out


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return f"{x:.3f}"
    return str(x)


def analyze(P: Presentation, options: AnalysisOptions = AnalysisOptions(),
            trial: Optional[int] = None) -> TrialVerdict:
    """Run every analyzer on P.

    The freeness route only runs when no collapse certificate was issued,
    so a verdict never carries both a cyclic type and a free rank.
    """
    p = P.params
    v = TrialVerdict(
        model=p.model if p else None, n=P.n, k=P.k, d=p.d if p else None,
        seed=p.seed if p else None, trial=trial, N=len(P),
    )
    ab = abelianization(P)
    v.abelianization = ab
    col = collapse_certificate(P, witnesses=options.witnesses,
                               require_spanning=options.require_spanning, ab=ab)
    v.collapse = col is not None
    if col is not None:
        v.collapse_m = col.cyclic_order_upper
        v.exact_type = str(ab)
        v.certificates["collapse"] = col.to_json()
        v.free = False
    else:
        fr = freeness_certificate(P, require_no_repeats=options.require_no_repeats,
                                  fallback_tietze=options.fallback_tietze, ab=ab)
        v.free = fr is not None
        if fr is not None:
            v.free_rank = fr.final_rank
            v.certificates["freeness"] = fr.to_json()
        elif options.witnesses:
            g = antipodal_graph(P)
            obstruction = hypergraphs_all_trees(g)
            if not isinstance(obstruction, AllTrees):
                v.certificates["hypergraph_cycle"] = obstruction.to_json(g)
    # soundness pass-through, independent of the certificate internals
    if v.collapse and not (ab.is_cyclic and ab.order is not None and v.collapse_m % ab.order == 0):
        raise CertificateError(f"cyclic verdict with abelianization {ab}")
    if v.free and not ab.is_free_abelian(v.free_rank):
        raise CertificateError(f"free({v.free_rank}) verdict with abelianization {ab}")

    v.positive_count = positive_count(P)
    v.almost_positive = almost_positive_exists(P)
    v.repeated_letters = has_repeated_letter(P)
    v.euler_char = euler_characteristic(P)
    v.not_free_advisory = not_free_advisory(P)
    if options.piece_spectrum and len(P):
        spec = piece_spectrum(P)
        v.max_piece = spec.max_piece
        v.cprime_pass = spec.max_piece < Fraction(options.lam) * P.k
        if p is not None:
            eps = default_epsilon(p.d) if options.eps is None else Fraction(options.eps)
            # two faces glued along the longest piece have boundary 2k - 2 max_piece
            boundary = 2 * P.k - 2 * min(spec.max_piece, P.k)
            v.two_face_pass = spec.max_piece == 0 or boundary >= 2 * isoperimetric_target(P.k, p.d, eps)
    return v


def certify(P: Presentation, witnesses: bool = True, lam=Fraction(1, 6)) -> dict:
    """Verdict JSON for one presentation (witnesses on by default)."""
    return analyze(P, AnalysisOptions(witnesses=witnesses, lam=Fraction(lam))).to_json()


# -- config files ------------------------------------------------------------

class ConfigError(ValueError):
    pass


_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def parse_kv(text: str) -> dict[str, tuple[int, str]]:
    """``key = value`` lines -> {key: (line number, raw value)}; '#' starts a comment."""
    out = {}
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {no}: expected 'key = value', got {raw!r}")
        if key in out:
            raise ConfigError(f"line {no}: duplicate key {key!r}")
        out[key] = (no, value.strip())
    return out


def _convert(entry, kind, key):
    no, raw = entry
    try:
        if kind == "bool":
            low = raw.lower()
            if low not in _TRUE | _FALSE:
                raise ValueError(f"not a boolean: {raw!r}")
            return low in _TRUE
        if kind == "int":
            return int(raw)
        if kind == "frac":
            return parse_density(raw)
        if kind == "ints":
            return [int(x) for x in raw.split(",") if x.strip()]
        if kind == "fracs":
            return [parse_density(x) for x in raw.split(",") if x.strip()]
        return raw
    except (ValueError, ZeroDivisionError) as e:
        raise ConfigError(f"line {no}: bad value for {key!r}: {e}") from None


def read_config(text: str, schema: dict, required: tuple) -> dict:
    kv = parse_kv(text)
    for key, (no, _) in kv.items():
        if key not in schema:
            raise ConfigError(f"line {no}: unknown key {key!r}")
    missing = [k for k in required if k not in kv]
    if missing:
        raise ConfigError(f"missing keys: {', '.join(missing)}")
    return {key: _convert(kv[key], schema[key], key) for key in kv}


@dataclass(frozen=True)
class SweepConfig:
    model: str
    k: int
    ns: tuple[int, ...]
    ds: tuple[Fraction, ...]
    trials: int
    seed: int = 0
    witnesses: bool = False
    piece_spectrum: bool = True
    lam: Fraction = Fraction(1, 6)
    eps: Optional[Fraction] = None
    require_spanning: bool = False
    workers: int = 1
    timing: bool = False

    SCHEMA = {
        "model": "str", "k": "int", "n": "ints", "d": "fracs", "trials": "int", "seed": "int",
        "witnesses": "bool", "piece_spectrum": "bool", "lambda": "frac", "epsilon": "frac",
        "require_spanning": "bool", "workers": "int", "timing": "bool",
    }

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if not self.ns or not self.ds:
            raise ConfigError("need at least one n and one d")
        if self.trials < 0 or self.workers < 1:
            raise ConfigError("trials must be >= 0 and workers >= 1")

    @classmethod
    def parse(cls, text: str) -> "SweepConfig":
        c = read_config(text, cls.SCHEMA, ("model", "k", "n", "d", "trials"))
        rename = {"n": "ns", "d": "ds", "lambda": "lam", "epsilon": "eps"}
        kw = {rename.get(k, k): v for k, v in c.items()}
        kw["ns"], kw["ds"] = tuple(kw["ns"]), tuple(kw["ds"])
        return cls(**kw)

    @property
    def options(self) -> AnalysisOptions:
        return AnalysisOptions(witnesses=self.witnesses, piece_spectrum=self.piece_spectrum,
                               lam=self.lam, eps=self.eps, require_spanning=self.require_spanning)

    def cells(self) -> list[tuple[int, int, Fraction]]:
        """(cell index, n, d), n-major."""
        return [(i, n, d) for i, (n, d) in enumerate(product(self.ns, self.ds))]


# -- sweeps ------------------------------------------------------------------

def run_trial(config: SweepConfig, cell: int, n: int, d: Fraction, trial: int) -> TrialVerdict:
    """One sweep trial; failures come back as a verdict with ``error`` set."""
    seed = trial_seed(config.seed, cell, trial)
    t0 = time.perf_counter()
    try:
        P = sample(ModelParams(config.model, n, config.k, d, seed))
        v = analyze(P, config.options, trial=trial)
    except Exception as e:  # recorded, never fatal
        v = TrialVerdict(config.model, n, config.k, d, seed, trial, None,
                         error=f"{type(e).__name__}: {e}")
    if config.timing:
        v.elapsed_ms = (time.perf_counter() - t0) * 1000
    return v


def _task(args) -> list[str]:
    config, cell, n, d, trial = args
    return run_trial(config, cell, n, d, trial).row()


def _tasks(config: SweepConfig):
    for cell, n, d in config.cells():
        for t in range(config.trials):
            yield (config, cell, n, d, t)


def sweep_rows(config: SweepConfig, skip: int = 0) -> Iterator[list[str]]:
    """CSV rows (without header) in deterministic order, starting after ``skip`` rows."""
    tasks = list(_tasks(config))[skip:]
    if config.workers == 1 or len(tasks) < 2:
        for t in tasks:
            yield _task(t)
        return
    chunk = max(1, len(tasks) // (config.workers * 8))
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        yield from pool.map(_task, tasks, chunksize=chunk)


def _csv_line(row) -> str:
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(row)
    return buf.getvalue()


HEADER = _csv_line(COLUMNS)


def run_sweep(config: SweepConfig, out_path=None, resume: bool = False) -> Optional[str]:
    """Run the sweep; return the CSV text, or append it to ``out_path``.

    With ``resume`` an existing output is cut back to its last complete cell
    and the sweep continues from there; the result is byte-identical to an
    uninterrupted run.
    """
    if out_path is None:
        return HEADER + "".join(_csv_line(r) for r in sweep_rows(config))
    path = Path(out_path)
    done = 0
    if resume and path.exists():
        text = path.read_text(encoding="utf-8")
        if text and not text.startswith(HEADER):
            raise ConfigError(f"{path}: existing file has a different header")
        lines = text.splitlines(keepends=True)[1:]
        lines = [ln for ln in lines if ln.endswith("\n")]
        per_cell = max(config.trials, 1)
        done = (len(lines) // per_cell) * per_cell
        path.write_text(HEADER + "".join(lines[:done]), encoding="utf-8")
    else:
        path.write_text(HEADER, encoding="utf-8")
    with path.open("a", encoding="utf-8") as fh:
        for i, row in enumerate(sweep_rows(config, skip=done), done + 1):
            fh.write(_csv_line(row))
            if config.trials and i % config.trials == 0:
                fh.flush()
                os.fsync(fh.fileno())
    return None


def read_sweep(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))
