"""Exact checker for the bilinear wave-Sobolev product-estimate conditions.

A parameter tuple (s0, s1, s2, b0, b1, b2) of affine-in-s expressions over
epsilon-extended rationals is admissible when fourteen inequalities hold for
every s in a given range.  Everything here is exact: rationals are
``fractions.Fraction`` and the +/- exponent decorations are integer orders of
a single formal positive infinitesimal, ordered lexicographically after the
rational base.

Because every inequality is affine in s, validity over a range is decided at
the endpoints.  At an open endpoint a zero rational base passes exactly when
the slope makes the inequality strict immediately inside (any epsilon deficit
is then dominated by a real increment).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Iterable

__all__ = [
    "EpsVal",
    "ParamExpr",
    "Interval",
    "EstimateParams",
    "Verdict",
    "ConditionEval",
    "check_conditions",
    "explain",
    "verify_corpus",
    "load_corpus",
    "parse_param_expr",
    "CONDITION_NAMES",
]

RationalLike = int | Fraction


@dataclass(frozen=True, order=False)
class EpsVal:
    """Exact rational plus an integer multiple of a formal infinitesimal."""

    base: Fraction
    eps: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base", Fraction(self.base))

    @classmethod
    def of(cls, base: RationalLike, eps: int = 0) -> "EpsVal":
        return cls(Fraction(base), eps)

    def _key(self) -> tuple[Fraction, int]:
        return (self.base, self.eps)

    def __lt__(self, other: "EpsVal") -> bool:
        return self._key() < other._key()

    def __le__(self, other: "EpsVal") -> bool:
        return self._key() <= other._key()

    def __gt__(self, other: "EpsVal") -> bool:
        return self._key() > other._key()

    def __ge__(self, other: "EpsVal") -> bool:
        return self._key() >= other._key()

    def __add__(self, other: "EpsVal") -> "EpsVal":
        return EpsVal(self.base + other.base, self.eps + other.eps)

    def __sub__(self, other: "EpsVal") -> "EpsVal":
        return EpsVal(self.base - other.base, self.eps - other.eps)

    def __neg__(self) -> "EpsVal":
        return EpsVal(-self.base, -self.eps)

    def __mul__(self, k: int) -> "EpsVal":
        if not isinstance(k, int):
            raise TypeError("EpsVal scales by integers only")
        return EpsVal(self.base * k, self.eps * k)

    __rmul__ = __mul__

    def __str__(self) -> str:
        marks = {-2: "--", -1: "-", 0: "", 1: "+", 2: "++"}
        mark = marks.get(self.eps, f"{self.eps:+d}eps")
        return f"{self.base}{mark}"


ZERO = EpsVal.of(0)


@dataclass(frozen=True)
class ParamExpr:
    """Affine expression slope*s + offset with an EpsVal offset."""

    slope: Fraction
    offset: EpsVal

    def __post_init__(self) -> None:
        object.__setattr__(self, "slope", Fraction(self.slope))

    @classmethod
    def const(cls, base: RationalLike, eps: int = 0) -> "ParamExpr":
        return cls(Fraction(0), EpsVal.of(base, eps))

    @classmethod
    def linear(cls, slope: RationalLike, base: RationalLike = 0,
               eps: int = 0) -> "ParamExpr":
        return cls(Fraction(slope), EpsVal.of(base, eps))

    def __add__(self, other: "ParamExpr") -> "ParamExpr":
        return ParamExpr(self.slope + other.slope, self.offset + other.offset)

    def __sub__(self, other: "ParamExpr") -> "ParamExpr":
        return ParamExpr(self.slope - other.slope, self.offset - other.offset)

    def __neg__(self) -> "ParamExpr":
        return ParamExpr(-self.slope, -self.offset)

    def __mul__(self, k: int) -> "ParamExpr":
        return ParamExpr(self.slope * k, self.offset * k)

    __rmul__ = __mul__

    def eval(self, s: RationalLike) -> EpsVal:
        return EpsVal(self.slope * Fraction(s) + self.offset.base,
                      self.offset.eps)

    def __str__(self) -> str:
        if self.slope == 0:
            return str(self.offset)
        if self.slope == 1:
            head = "s"
        elif self.slope == -1:
            head = "-s"
        else:
            head = f"{self.slope}*s"
        if self.offset.base == 0 and self.offset.eps == 0:
            return head
        tail = str(self.offset)
        return f"{head}+{tail}" if not tail.startswith("-") else f"{head}{tail}"


_MARK = {"": 0, "+": 1, "++": 2, "-": -1, "--": -2}


def parse_param_expr(text: str) -> ParamExpr:
    """Parse the corpus mini-grammar: affine in s, trailing epsilon markers.

    Examples: "7/4-2*s+", "s-1", "1/2+", "0--", "-1/2-".
    """
    t = text.strip().replace(" ", "")
    if not t:
        raise ValueError("empty parameter expression")
    m = re.search(r"([+-]{1,2})$", t)
    eps = 0
    if m:
        # a trailing sign run is an epsilon marker, not a dangling operator
        candidate = t[: m.start(1)]
        if candidate and candidate[-1] not in "+-*/":
            eps = _MARK[m.group(1)]
            t = candidate
    terms = re.findall(r"[+-]?[^+-]+", t)
    if "".join(terms) != t:
        raise ValueError(f"cannot parse parameter expression {text!r}")
    slope = Fraction(0)
    base = Fraction(0)
    for term in terms:
        if term in ("s", "+s"):
            slope += 1
        elif term == "-s":
            slope -= 1
        elif term.endswith("s"):
            coef = term[:-1].rstrip("*")
            if coef in ("", "+"):
                slope += 1
            elif coef == "-":
                slope -= 1
            else:
                slope += Fraction(coef)
        else:
            base += Fraction(term)
    return ParamExpr(slope, EpsVal(base, eps))


@dataclass(frozen=True)
class Interval:
    """Range of s with open or closed endpoints."""

    lo: Fraction
    hi: Fraction
    lo_open: bool = True
    hi_open: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise ValueError("empty range")
        if self.lo == self.hi and (self.lo_open or self.hi_open):
            raise ValueError("degenerate open range")

    @classmethod
    def parse(cls, text: str) -> "Interval":
        t = text.strip().replace(" ", "")
        m = re.fullmatch(r"([\(\[])([^,]+),([^,\)\]]+)([\)\]])", t)
        if not m:
            raise ValueError(f"bad interval {text!r}")
        return cls(Fraction(m.group(2)), Fraction(m.group(3)),
                   m.group(1) == "(", m.group(4) == ")")

    def contains(self, s: RationalLike) -> bool:
        s = Fraction(s)
        lo_ok = s > self.lo if self.lo_open else s >= self.lo
        hi_ok = s < self.hi if self.hi_open else s <= self.hi
        return lo_ok and hi_ok

    def __str__(self) -> str:
        lo = "(" if self.lo_open else "["
        hi = ")" if self.hi_open else "]"
        return f"{lo}{self.lo},{self.hi}{hi}"


@dataclass(frozen=True)
class EstimateParams:
    s0: ParamExpr
    b0: ParamExpr
    s1: ParamExpr
    b1: ParamExpr
    s2: ParamExpr
    b2: ParamExpr
    s_range: Interval

    def replace(self, **kw) -> "EstimateParams":
        data = {k: getattr(self, k) for k in
                ("s0", "b0", "s1", "b1", "s2", "b2", "s_range")}
        data.update(kw)
        return EstimateParams(**data)


@dataclass(frozen=True)
class Verdict:
    holds: bool
    violations: tuple[tuple[str, str], ...] = ()

    def violated_names(self) -> set[str]:
        return {name for name, _ in self.violations}


# -- the fourteen conditions ----------------------------------------------------

CONDITION_NAMES = (
    "b_sum_gt_half",
    "b0_plus_b1_pos",
    "b0_plus_b2_pos",
    "b1_plus_b2_pos",
    "s_sum_gt_3half_minus_bsum",
    "s_sum_gt_1_minus_min_bpair",
    "s_sum_gt_half_minus_min_b",
    "s_sum_gt_3quarters",
    "s0b0_2s1_2s2_gt_1",
    "s1b1_2s0_2s2_gt_1",
    "s2b2_2s0_2s1_gt_1",
    "s1_s2_ge_max0_negb0",
    "s0_s2_ge_max0_negb1",
    "s0_s1_ge_max0_negb2",
)

HALF = Fraction(1, 2)


def _conditions(p: EstimateParams) -> list[tuple[str, list[ParamExpr], bool]]:
    """Each condition is a conjunction of affine forms g(s) required > 0
    (or >= 0 for the strict=False ones)."""
    c = ParamExpr.const
    s_sum = p.s0 + p.s1 + p.s2
    b_sum = p.b0 + p.b1 + p.b2
    pairs = [p.b0 + p.b1, p.b0 + p.b2, p.b1 + p.b2]
    out: list[tuple[str, list[ParamExpr], bool]] = [
        ("b_sum_gt_half", [b_sum - c(HALF)], True),
        ("b0_plus_b1_pos", [pairs[0]], True),
        ("b0_plus_b2_pos", [pairs[1]], True),
        ("b1_plus_b2_pos", [pairs[2]], True),
        ("s_sum_gt_3half_minus_bsum", [s_sum + b_sum - c(Fraction(3, 2))], True),
        ("s_sum_gt_1_minus_min_bpair",
         [s_sum + pair - c(1) for pair in pairs], True),
        ("s_sum_gt_half_minus_min_b",
         [s_sum + b - c(HALF) for b in (p.b0, p.b1, p.b2)], True),
        ("s_sum_gt_3quarters", [s_sum - c(Fraction(3, 4))], True),
        ("s0b0_2s1_2s2_gt_1", [p.s0 + p.b0 + 2 * p.s1 + 2 * p.s2 - c(1)], True),
        ("s1b1_2s0_2s2_gt_1", [p.s1 + p.b1 + 2 * p.s0 + 2 * p.s2 - c(1)], True),
        ("s2b2_2s0_2s1_gt_1", [p.s2 + p.b2 + 2 * p.s0 + 2 * p.s1 - c(1)], True),
        ("s1_s2_ge_max0_negb0", [p.s1 + p.s2, p.s1 + p.s2 + p.b0], False),
        ("s0_s2_ge_max0_negb1", [p.s0 + p.s2, p.s0 + p.s2 + p.b1], False),
        ("s0_s1_ge_max0_negb2", [p.s0 + p.s1, p.s0 + p.s1 + p.b2], False),
    ]
    return out


def _holds_on_range(g: ParamExpr, rng: Interval, strict: bool) -> tuple[bool, str]:
    """Decide g(s) > 0 (or >= 0) for all s in rng.  Returns (ok, witness)."""

    def at_closed(s: Fraction) -> bool:
        v = g.eval(s)
        return v > ZERO if strict else v >= ZERO

    def at_open_binding(s: Fraction) -> bool:
        # interior points add a real positive increment along the slope, so
        # only the rational base matters; any epsilon deficit is dominated
        v = g.eval(s)
        return v.base >= 0

    if g.slope == 0:
        ok = at_closed(rng.lo)
        return ok, "all"
    if g.slope > 0:
        ok = at_open_binding(rng.lo) if rng.lo_open else at_closed(rng.lo)
        return ok, f"s={rng.lo}" + (" (open)" if rng.lo_open else "")
    ok = at_open_binding(rng.hi) if rng.hi_open else at_closed(rng.hi)
    return ok, f"s={rng.hi}" + (" (open)" if rng.hi_open else "")


def check_conditions(p: EstimateParams) -> Verdict:
    """Decide all fourteen admissibility conditions over the full s-range."""
    violations: list[tuple[str, str]] = []
    for name, forms, strict in _conditions(p):
        for g in forms:
            ok, witness = _holds_on_range(g, p.s_range, strict)
            if not ok:
                violations.append((name, witness))
                break
    return Verdict(holds=not violations, violations=tuple(violations))


@dataclass(frozen=True)
class ConditionEval:
    name: str
    value: EpsVal
    threshold: EpsVal
    strict: bool
    satisfied: bool

    def __str__(self) -> str:
        rel = ">" if self.strict else ">="
        mark = "ok" if self.satisfied else "VIOLATED"
        return f"{self.name}: {self.value} {rel} {self.threshold} [{mark}]"


def explain(p: EstimateParams, s: RationalLike) -> list[ConditionEval]:
    """Evaluate all fourteen conditions at one rational s inside the range."""
    s = Fraction(s)
    if not p.s_range.contains(s):
        raise ValueError(f"s={s} outside range {p.s_range}")
    rows = []
    for name, forms, strict in _conditions(p):
        # conjunction: report the tightest member at this s
        vals = [g.eval(s) for g in forms]
        v = min(vals)
        ok = v > ZERO if strict else v >= ZERO
        rows.append(ConditionEval(name, v, ZERO, strict, ok))
    return rows


# -- corpus ----------------------------------------------------------------------


@dataclass(frozen=True)
class CorpusEntry:
    estimate_id: str
    params: EstimateParams
    note: str = ""


def _parse_corpus_text(text: str) -> list[CorpusEntry]:
    entries = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) not in (8, 9):
            raise ValueError(f"corpus line needs 8 or 9 fields: {raw!r}")
        eid, s0, b0, s1, b1, s2, b2, rng = parts[:8]
        note = parts[8] if len(parts) == 9 else ""
        params = EstimateParams(
            s0=parse_param_expr(s0), b0=parse_param_expr(b0),
            s1=parse_param_expr(s1), b1=parse_param_expr(b1),
            s2=parse_param_expr(s2), b2=parse_param_expr(b2),
            s_range=Interval.parse(rng))
        entries.append(CorpusEntry(eid, params, note))
    return entries


def load_corpus(path: str | None = None) -> list[CorpusEntry]:
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            return _parse_corpus_text(fh.read())
    text = resources.files("mcshlab").joinpath("data/estimate_corpus.txt").read_text()
    return _parse_corpus_text(text)


PRINTED_PREFIX = "printed_"


def split_corpus(entries: Iterable[CorpusEntry]
                 ) -> tuple[list[CorpusEntry], list[CorpusEntry]]:
    """Separate the all-hold set from the literal expected-violation records."""
    main, printed = [], []
    for e in entries:
        (printed if e.estimate_id.startswith(PRINTED_PREFIX) else main).append(e)
    return main, printed


def verify_corpus(entries: Iterable[CorpusEntry] | None = None
                        ) -> list[tuple[str, str, Verdict]]:
    """Check every all-hold corpus entry on its regime; returns (id, range, verdict)."""
    if entries is None:
        entries, _ = split_corpus(load_corpus())
    return [(e.estimate_id, str(e.params.s_range), check_conditions(e.params))
            for e in entries]


def verify_printed_variants() -> list[tuple[str, str, Verdict, str]]:
    """Check the literal transcriptions kept on record as expected violations."""
    _, printed = split_corpus(load_corpus())
    return [(e.estimate_id, str(e.params.s_range), check_conditions(e.params),
             e.note) for e in printed]
