"""Constraint parsing, compilation to bin masks, and feasibility checking.

Single-feature constraints compile to boolean masks over a feature's bins
(a bin is valid when its interval intersects the constrained region).
Inter-column constraints stay symbolic: during generation they induce
dynamic masks from realized bin centers, and at emission they are enforced
on raw values. Equality on a continuous feature targets the containing bin;
raw output is pinned to the exact value only in exact-equality mode.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dag import CausalDag
from .discretize import CATEGORICAL, CONTINUOUS, Discretizer
from .errors import TypeMismatchError, UnknownFeatureError

COMPARISON_OPS = (">", ">=", "<", "<=")
ALL_OPS = COMPARISON_OPS + ("=", "!=")


@dataclass
class Range:
    feature: str
    low: float | None = None
    high: float | None = None
    low_inclusive: bool = True
    high_inclusive: bool = True

    def __post_init__(self):
        if self.low is not None and self.high is not None and self.low > self.high:
            raise ValueError(f"range on {self.feature!r} has low > high")


@dataclass
class Equality:
    feature: str
    value: object


@dataclass
class Inequality:
    """feature != value."""

    feature: str
    value: object


@dataclass
class InterColumn:
    left: str
    op: str
    right: str

    def __post_init__(self):
        if self.op not in ALL_OPS:
            raise ValueError(f"unknown operator {self.op!r}")
        if self.left == self.right:
            raise ValueError("inter-column constraint needs two distinct features")


Constraint = Range | Equality | Inequality | InterColumn


def parse_constraints(obj: list) -> list[Constraint]:
    out: list[Constraint] = []
    for item in obj:
        kind = item.get("type")
        if kind == "range":
            out.append(Range(feature=item["feature"],
                             low=item.get("low"), high=item.get("high"),
                             low_inclusive=item.get("low_inclusive", True),
                             high_inclusive=item.get("high_inclusive", True)))
        elif kind == "equality":
            out.append(Equality(feature=item["feature"], value=item["value"]))
        elif kind == "inequality":
            out.append(Inequality(feature=item["feature"], value=item["value"]))
        elif kind == "intercol":
            out.append(InterColumn(left=item["left"], op=item["op"], right=item["right"]))
        else:
            raise ValueError(f"unknown constraint type {kind!r}")
    return out


def constraints_to_obj(constraints: list[Constraint]) -> list[dict]:
    out = []
    for c in constraints:
        if isinstance(c, Range):
            out.append({"type": "range", "feature": c.feature, "low": c.low, "high": c.high,
                        "low_inclusive": c.low_inclusive, "high_inclusive": c.high_inclusive})
        elif isinstance(c, Equality):
            out.append({"type": "equality", "feature": c.feature, "value": c.value})
        elif isinstance(c, Inequality):
            out.append({"type": "inequality", "feature": c.feature, "value": c.value})
        else:
            out.append({"type": "intercol", "left": c.left, "op": c.op, "right": c.right})
    return out


def load_constraints(path: str) -> list[Constraint]:
    with open(path) as fh:
        return parse_constraints(json.load(fh))


# --- compilation to masks ---

def _bin_contains(spec, b: int, v: float) -> bool:
    lo, hi = spec.bin_interval(b)
    closed = (b == spec.k_eff - 1) or hi <= lo
    return lo <= v < hi or (closed and v == hi)


def _bin_intersects_region(spec, b: int, low, low_inc, high, high_inc) -> bool:
    blo, bhi = spec.bin_interval(b)
    bin_closed_right = (b == spec.k_eff - 1) or bhi <= blo
    lo = blo if low is None else max(blo, low)
    hi = bhi if high is None else min(bhi, high)
    if lo > hi:
        return False
    if lo < hi:
        return True
    # single touching point: must be admitted by every boundary it sits on
    p = lo
    if p < blo or (p == bhi and not bin_closed_right):
        return False
    if low is not None and p == low and not low_inc:
        return False
    if high is not None and p == high and not high_inc:
        return False
    return True


def compile_constraint(c: Constraint, disc: Discretizer) -> np.ndarray:
    """Valid-bin mask of a single-feature constraint."""
    if isinstance(c, InterColumn):
        raise TypeError("inter-column constraints do not compile to a single mask")
    fi = disc.index_of(c.feature)
    spec = disc.features[fi]
    k = spec.k_eff
    if isinstance(c, Range):
        if spec.kind == CATEGORICAL:
            raise TypeMismatchError(f"range constraint on categorical feature {c.feature!r}")
        return np.array([_bin_intersects_region(spec, b, c.low, c.low_inclusive,
                                                c.high, c.high_inclusive)
                         for b in range(k)])
    if isinstance(c, Equality):
        mask = np.zeros(k, dtype=bool)
        if spec.kind == CATEGORICAL:
            idx = spec._cat_index.get(str(c.value))
            if idx is not None:
                mask[idx] = True
        else:
            v = float(c.value)
            for b in range(k):
                if _bin_contains(spec, b, v):
                    mask[b] = True
        return mask
    # Inequality: only bins *entirely equal* to the value are excluded
    mask = np.ones(k, dtype=bool)
    if spec.kind == CATEGORICAL:
        idx = spec._cat_index.get(str(c.value))
        if idx is not None:
            mask[idx] = False
    else:
        v = float(c.value)
        for b in range(k):
            lo, hi = spec.bin_interval(b)
            if lo == hi == v:
                mask[b] = False
    return mask


def intersect_masks(masks: list[np.ndarray]) -> np.ndarray:
    out = masks[0].copy()
    for m in masks[1:]:
        out &= m
    return out


@dataclass
class CompiledConstraints:
    constraints: list[Constraint]
    static_masks: dict[int, np.ndarray]                 # feature -> AND of its masks
    intercolumn: list[tuple[int, str, int]]             # (left idx, op, right idx)
    raw_bounds: dict[int, tuple]                        # feature -> (low, low_inc, high, high_inc)
    pinned: dict[int, float]                            # exact-equality raw pins
    exact_equality: bool = False

    def mask_for(self, feature: int) -> np.ndarray | None:
        return self.static_masks.get(feature)


def compile_constraint_set(constraints: list[Constraint], disc: Discretizer,
                           exact_equality: bool = False) -> CompiledConstraints:
    static: dict[int, list[np.ndarray]] = {}
    inter: list[tuple[int, str, int]] = []
    bounds: dict[int, list] = {}
    pinned: dict[int, float] = {}
    for c in constraints:
        if isinstance(c, InterColumn):
            li, ri = disc.index_of(c.left), disc.index_of(c.right)
            lk, rk = disc.features[li].kind, disc.features[ri].kind
            if c.op in COMPARISON_OPS and (lk != CONTINUOUS or rk != CONTINUOUS):
                raise TypeMismatchError(
                    f"comparison {c.op!r} needs continuous features on both sides")
            if c.op in ("=", "!=") and lk != rk:
                raise TypeMismatchError(
                    f"{c.op!r} between {c.left!r} and {c.right!r} mixes feature kinds")
            inter.append((li, c.op, ri))
            continue
        fi = disc.index_of(c.feature)
        static.setdefault(fi, []).append(compile_constraint(c, disc))
        if isinstance(c, Range):
            rec = bounds.setdefault(fi, [None, True, None, True])
            if c.low is not None:
                if rec[0] is None or c.low > rec[0]:
                    rec[0], rec[1] = c.low, c.low_inclusive
                elif c.low == rec[0]:
                    rec[1] = rec[1] and c.low_inclusive
            if c.high is not None:
                if rec[2] is None or c.high < rec[2]:
                    rec[2], rec[3] = c.high, c.high_inclusive
                elif c.high == rec[2]:
                    rec[3] = rec[3] and c.high_inclusive
        if isinstance(c, Equality) and exact_equality \
                and disc.features[fi].kind == CONTINUOUS:
            pinned[fi] = float(c.value)
    return CompiledConstraints(
        constraints=list(constraints),
        static_masks={fi: intersect_masks(ms) for fi, ms in static.items()},
        intercolumn=inter,
        raw_bounds={fi: tuple(rec) for fi, rec in bounds.items()},
        pinned=pinned,
        exact_equality=exact_equality,
    )


# --- dynamic propagation helpers ---

def induced_mask(disc: Discretizer, target: int, op_for_target: str, pivot) -> np.ndarray:
    """Valid bins of ``target`` so that (target op pivot) can hold, judged on
    bin centers (comparisons) or interval containment (equality)."""
    spec = disc.features[target]
    k = spec.k_eff
    if spec.kind == CATEGORICAL:
        mask = np.zeros(k, dtype=bool) if op_for_target == "=" else np.ones(k, dtype=bool)
        idx = spec._cat_index.get(str(pivot))
        if idx is not None:
            mask[idx] = op_for_target == "="
        return mask
    if op_for_target == "!=":
        return np.ones(k, dtype=bool)  # measure-zero at raw level
    if op_for_target == "=":
        return np.array([_bin_contains(spec, b, float(pivot)) for b in range(k)])
    centers = np.array([spec.bin_center(b) for b in range(k)])
    v = float(pivot)
    if op_for_target == ">":
        return centers > v
    if op_for_target == ">=":
        return centers >= v
    if op_for_target == "<":
        return centers < v
    return centers <= v


def flip_op(op: str) -> str:
    """Operator seen from the right endpoint: (L op R) == (R flip_op(op) L)."""
    return {">": "<", ">=": "<=", "<": ">", "<=": ">=", "=": "=", "!=": "!="}[op]


# --- raw-level satisfaction ---

def _raw_op(a, b, op: str) -> bool:
    if op == ">":
        return a > b
    if op == ">=":
        return a >= b
    if op == "<":
        return a < b
    if op == "<=":
        return a <= b
    if op == "=":
        return a == b
    return a != b


def row_satisfies(raw_row, cs: CompiledConstraints, disc: Discretizer) -> bool:
    for c in cs.constraints:
        if isinstance(c, InterColumn):
            li, ri = disc.index_of(c.left), disc.index_of(c.right)
            if not _raw_op(raw_row[li], raw_row[ri], c.op):
                return False
            continue
        fi = disc.index_of(c.feature)
        spec = disc.features[fi]
        x = raw_row[fi]
        if isinstance(c, Range):
            if c.low is not None and (x < c.low or (x == c.low and not c.low_inclusive)):
                return False
            if c.high is not None and (x > c.high or (x == c.high and not c.high_inclusive)):
                return False
        elif isinstance(c, Equality):
            if spec.kind == CATEGORICAL:
                if str(x) != str(c.value):
                    return False
            elif cs.exact_equality:
                if float(x) != float(c.value):
                    return False
            else:
                # bin-level semantics: the value's containing bin
                v = float(c.value)
                if not any(_bin_contains(spec, b, v) and _bin_contains(spec, b, float(x))
                           for b in range(spec.k_eff)):
                    return False
        else:
            if spec.kind == CATEGORICAL:
                if str(x) == str(c.value):
                    return False
            elif float(x) == float(c.value):
                return False
    return True


def satisfaction_mask(raw_columns: list[np.ndarray], cs: CompiledConstraints,
                      disc: Discretizer) -> np.ndarray:
    """Vectorized row_satisfies over a table given as per-feature columns."""
    n = len(raw_columns[0]) if raw_columns else 0
    ok = np.ones(n, dtype=bool)
    for c in cs.constraints:
        if isinstance(c, InterColumn):
            li, ri = disc.index_of(c.left), disc.index_of(c.right)
            a, b = raw_columns[li], raw_columns[ri]
            if c.op == ">":
                ok &= a > b
            elif c.op == ">=":
                ok &= a >= b
            elif c.op == "<":
                ok &= a < b
            elif c.op == "<=":
                ok &= a <= b
            elif c.op == "=":
                ok &= a == b
            else:
                ok &= a != b
            continue
        fi = disc.index_of(c.feature)
        spec = disc.features[fi]
        col = raw_columns[fi]
        if isinstance(c, Range):
            if c.low is not None:
                ok &= (col > c.low) if not c.low_inclusive else (col >= c.low)
            if c.high is not None:
                ok &= (col < c.high) if not c.high_inclusive else (col <= c.high)
        elif isinstance(c, Equality):
            if spec.kind == CATEGORICAL:
                ok &= np.array([str(x) == str(c.value) for x in col])
            elif cs.exact_equality:
                ok &= np.asarray(col, dtype=float) == float(c.value)
            else:
                v = float(c.value)
                vbins = [b for b in range(spec.k_eff) if _bin_contains(spec, b, v)]
                if not vbins:
                    ok &= False
                else:
                    ok &= np.isin(spec.values_to_bins(np.asarray(col, dtype=float)), vbins)
        else:
            if spec.kind == CATEGORICAL:
                ok &= np.array([str(x) != str(c.value) for x in col])
            else:
                ok &= np.asarray(col, dtype=float) != float(c.value)
    return ok


# --- feasibility ---

@dataclass
class FeasibilityReport:
    feasible: bool
    failures: list[str]

    def to_obj(self) -> dict:
        return {"feasible": self.feasible, "failures": self.failures}


def feasibility_check(cs: CompiledConstraints, disc: Discretizer,
                      dag: CausalDag | None = None) -> FeasibilityReport:
    """Necessary-condition check: per-feature masks non-empty and every
    inter-column pair admits at least one compatible bin pair. A PASS does
    not prove joint feasibility of adversarial sets; generation surfaces any
    residual conflict as a structured error."""
    failures: list[str] = []
    for fi, mask in sorted(cs.static_masks.items()):
        if not mask.any():
            failures.append(f"feature {disc.names[fi]!r}: no bin satisfies its constraints")

    def valid_bins(fi: int) -> np.ndarray:
        k = disc.features[fi].k_eff
        mask = cs.static_masks.get(fi)
        return np.nonzero(mask)[0] if mask is not None else np.arange(k)

    for li, op, ri in cs.intercolumn:
        lname, rname = disc.names[li], disc.names[ri]
        lb, rb = valid_bins(li), valid_bins(ri)
        if len(lb) == 0 or len(rb) == 0:
            continue  # already reported above
        lspec, rspec = disc.features[li], disc.features[ri]
        ok = False
        if op == "!=":
            if lspec.kind == CATEGORICAL:
                cats_l = {lspec.categories[b] for b in lb}
                cats_r = {rspec.categories[b] for b in rb}
                ok = not (len(cats_l) == 1 and cats_l == cats_r)
            else:
                ok = True
        elif op == "=":
            if lspec.kind == CATEGORICAL:
                ok = bool({lspec.categories[b] for b in lb}
                          & {rspec.categories[b] for b in rb})
            else:
                for b in lb:
                    lo, hi = lspec.bin_interval(b)
                    for b2 in rb:
                        lo2, hi2 = rspec.bin_interval(b2)
                        if max(lo, lo2) <= min(hi, hi2):
                            ok = True
                            break
                    if ok:
                        break
        else:
            lc = np.array([lspec.bin_center(b) for b in lb])
            rc = np.array([rspec.bin_center(b) for b in rb])
            if op == ">":
                ok = lc.max() > rc.min()
            elif op == ">=":
                ok = lc.max() >= rc.min()
            elif op == "<":
                ok = lc.min() < rc.max()
            else:
                ok = lc.min() <= rc.max()
        if not ok:
            failures.append(f"inter-column ({lname!r} {op} {rname!r}): "
                            "no compatible bin pair under the per-feature masks")
    return FeasibilityReport(feasible=not failures, failures=failures)
