"""Row generation: reverse-topological back-filling, masked forward
sampling, and a rejection baseline.

Back-filling runs two passes over each row. The reverse pass samples every
constrained node from its own marginal predictive restricted to its mask,
then walks constraint information upward: for each realized tree-backed
node, the leaves compatible with its realized bin are selected and the
node's still-unsampled parents are drawn from the stored backward
histograms (masked by the parents' own constraints). When several realized
children need the same parent, their requirement histograms are multiplied
element-wise so the parent lands in the intersection of all their feasible
domains. The forward pass then completes the row by ordinary ancestral
sampling with masks. Raw values are emitted by truncated inverse transform
inside each sampled bin, so every emitted row satisfies the constraint set;
inter-column boundary effects are resolved by bounded raw re-draws and, if
needed, full row regeneration.

Rows use independent RNG streams derived from (seed, row_index), so output
is reproducible regardless of worker count or execution order.
"""

from __future__ import annotations

import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from .constraints import (
    CompiledConstraints,
    feasibility_check,
    flip_op,
    induced_mask,
    row_satisfies,
    satisfaction_mask,
)
from .dag import reverse_topo
from .discretize import CATEGORICAL
from .errors import (
    EmptyMaskedDistributionError,
    InfeasibleConstraintsError,
    InfeasibleError,
    InfeasibleIntersectionError,
    NoFeasibleLeafError,
    RetriesExhaustedError,
)
from .kernels import BACKEND
from .model import Model
from .tree import TreeLeaf, filter_leaves

MODES = ("backfill", "forward_only", "rejection_baseline")
RAW_REDRAW_ATTEMPTS = 8


@dataclass
class GenerationConfig:
    n_rows: int
    mode: str = "backfill"
    max_row_retries: int = 64
    rng_seed: int = 0
    n_jobs: int = 1
    skip_feasibility: bool = False
    rejection_cap_per_row: int = 4096

    def __post_init__(self):
        if self.n_rows < 1:
            raise ValueError("n_rows must be >= 1")
        if self.max_row_retries < 1:
            raise ValueError("max_row_retries must be >= 1")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")


@dataclass
class GenerationReport:
    mode: str
    n_rows: int
    rng_seed: int
    csr: float
    attempts: int
    attempts_per_accepted: float
    row_retries: int
    raw_redraws: int
    wall_time_s: float
    backend: str = BACKEND
    retry_reasons: dict = field(default_factory=dict)

    def to_obj(self) -> dict:
        return {
            "mode": self.mode, "n_rows": self.n_rows, "rng_seed": self.rng_seed,
            "csr": self.csr, "attempts": self.attempts,
            "attempts_per_accepted": self.attempts_per_accepted,
            "row_retries": self.row_retries, "raw_redraws": self.raw_redraws,
            "wall_time_s": self.wall_time_s, "backend": self.backend,
            "retry_reasons": self.retry_reasons,
        }


class _RowRetry(Exception):
    """Internal: this row attempt failed; regenerate with fresh randomness."""

    def __init__(self, reason: str, cause: Exception | None = None):
        self.reason = reason
        self.cause = cause
        super().__init__(reason)


def masked_sample(dist, mask, rng: np.random.Generator) -> int:
    """Sample a bin from ``dist`` restricted to ``mask`` (renormalized)."""
    d = np.asarray(dist, dtype=np.float64)
    if mask is not None:
        d = np.where(mask, d, 0.0)
    cum = np.cumsum(d)
    total = cum[-1]
    if total <= 0.0:
        raise EmptyMaskedDistributionError("masked distribution has no mass")
    u = rng.random() * total
    return min(int(np.searchsorted(cum, u, side="right")), len(d) - 1)


def domain_intersect_parent(child_requirements: list[np.ndarray]) -> np.ndarray:
    """Element-wise product of per-child parent histograms, renormalized.

    An all-zero product is returned as-is; the caller maps it to
    InfeasibleIntersection.
    """
    h = np.asarray(child_requirements[0], dtype=np.float64).copy()
    for req in child_requirements[1:]:
        h *= np.asarray(req, dtype=np.float64)
    total = h.sum()
    return h / total if total > 0 else h


_M64 = 0xFFFFFFFFFFFFFFFF
_MIX = 0x9E3779B97F4A7C15  # 64-bit golden-ratio multiplier
_local = threading.local()


def _splitmix64(x: int) -> tuple[int, int]:
    """One splitmix64 step: (next state, output word)."""
    x = (x + _MIX) & _M64
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _M64
    return x, z ^ (z >> 31)


def _row_rng(seed: int, row_idx: int) -> np.random.Generator:
    """Independent PCG64 stream per (seed, row): state and stream increment
    are splitmix64-hashed from the pair, injected into a reusable per-thread
    bit generator. Output is reproducible for any execution order or worker
    count, and derivation stays cheap enough for sub-100us rows."""
    pair = getattr(_local, "rng_pair", None)
    if pair is None:
        bg = np.random.PCG64(0)
        pair = (bg, np.random.Generator(bg))
        _local.rng_pair = pair
    bg, gen = pair
    x = ((seed & _M64) * _MIX + row_idx * 0xD1342543DE82EF95 + 1) & _M64
    x, w1 = _splitmix64(x)
    x, w2 = _splitmix64(x)
    x, w3 = _splitmix64(x)
    _, w4 = _splitmix64(x)
    bg.state = {"bit_generator": "PCG64",
                "state": {"state": (w1 << 64) | w2, "inc": ((w3 << 64) | w4) | 1},
                "has_uint32": 0, "uinteger": 0}
    return gen


class _RowSampler:
    """Per-model immutable context shared across rows.

    Leaf filters, requirement mixtures, and smoothed backward histograms
    depend only on (node, realized bin), so they are computed once and
    cached; rows then mostly pay for bin draws and raw emission.
    """

    def __init__(self, model: Model, cc: CompiledConstraints, max_retries: int = 64):
        self.model = model
        self.cc = cc
        self.max_retries = max_retries
        self.disc = model.disc
        self.d = model.d
        self.order_fwd = model.dag.topo_order
        self.order_rev = reverse_topo(model.dag)
        self.children = [model.dag.children(i) for i in range(self.d)]
        # intercolumn constraints indexed by endpoint
        self.inter_by_node: dict[int, list[tuple[int, str, int]]] = {}
        for li, op, ri in cc.intercolumn:
            self.inter_by_node.setdefault(li, []).append((li, op, ri))
            self.inter_by_node.setdefault(ri, []).append((li, op, ri))
        self.tree_children = [[c for c in self.children[i]
                               if model.trees[c].parent_indices]
                              for i in range(self.d)]
        # domain intersection pools requirements of realized *constrained*
        # children; everyone else conditions on the parent once it is set
        self.constrained_tree_children = [
            [c for c in self.tree_children[i] if c in cc.static_masks]
            for i in range(self.d)]
        self.eq_partner: dict[int, int] = {}
        for li, op, ri in cc.intercolumn:
            if op == "=":
                self.eq_partner[li] = ri
                self.eq_partner[ri] = li
        self.categorical = [f.kind == CATEGORICAL for f in model.disc.features]
        self._bw: dict[int, list[np.ndarray]] = {}
        self._lik: dict[int, list[np.ndarray]] = {}
        self._fwd: dict[tuple, np.ndarray] = {}
        self._filter: dict[tuple, tuple] = {}
        self._req: dict[tuple, np.ndarray] = {}
        self._cum: dict[tuple, tuple] = {}
        self._interval: dict[tuple[int, int], tuple] = {}
        self._boxes: dict[int, list[np.ndarray]] = {}
        self._pos_of: dict[int, dict[int, int]] = {
            i: {gj: pos for pos, gj in enumerate(model.trees[i].parent_indices)}
            for i in range(self.d)}

    def _bw_tensors(self, node: int) -> list[np.ndarray]:
        """Per parent position, a dense (n_leaves, k_out, k_parent) smoothed
        backward histogram with the class-aggregated fallback baked in."""
        got = self._bw.get(node)
        if got is None:
            tree = self.model.trees[node]
            got = []
            for pos, kj in enumerate(tree.k_parents):
                b = np.empty((len(tree.leaves), tree.k_out, kj))
                for lid, lf in enumerate(tree.leaves):
                    b[lid, :, :] = lf.parent_hists[pos]
                    for c, hists in lf.class_parent.items():
                        b[lid, c, :] = hists[pos]
                b += tree.hp.backward_smoothing / kj
                got.append(b)
            self._bw[node] = got
        return got

    def _likelihood_tensors(self, node: int) -> list[np.ndarray]:
        """Per parent position, (n_leaves, k_out, k_parent) class rates
        P(class | parent bin, leaf): the class histogram over the leaf's
        aggregated one. Used when a back-filled parent has parents of its
        own already assigned, so its forward predictive supplies the prior
        and the leaf supplies only the likelihood of the realized class."""
        got = self._lik.get(node)
        if got is None:
            tree = self.model.trees[node]
            a = tree.hp.backward_smoothing / tree.k_out
            got = []
            for pos, kj in enumerate(tree.k_parents):
                num = np.zeros((len(tree.leaves), tree.k_out, kj))
                den = np.empty((len(tree.leaves), 1, kj))
                for lid, lf in enumerate(tree.leaves):
                    for c, hists in lf.class_parent.items():
                        num[lid, c, :] = hists[pos]
                    den[lid, 0, :] = lf.parent_hists[pos]
                got.append((num + a) / (den + a * tree.k_out))
            self._lik[node] = got
        return got

    def _forward_predictive(self, node: int, known: tuple) -> np.ndarray:
        """Model predictive of ``node`` given a partial parent assignment:
        occupancy-weighted mixture over the leaves still reachable."""
        key = (node, known)
        got = self._fwd.get(key)
        if got is None:
            tree = self.model.trees[node]
            keep = self._consistent_leaf_mask(node, known)
            w = tree.leaf_weights * keep
            pred = tree.leaf_alpha / tree.leaf_alpha.sum(axis=1, keepdims=True)
            got = w @ pred
            self._fwd[key] = got
        return got

    def _filtered(self, node: int, realized_bin: int, known: tuple = ()):
        """Filtered leaves of ``node`` at its realized bin, additionally
        restricted to leaves routable under already-assigned parent bins
        (standard conditioning on what is known); falls back to the
        unrestricted filter when the restriction empties the pool."""
        key = (node, realized_bin, known)
        got = self._filter.get(key)
        if got is None:
            tree = self.model.trees[node]
            ids, w = filter_leaves(tree, {realized_bin})
            if known and len(ids):
                keep = self._consistent_leaf_mask(node, known)
                sel = keep[ids]
                if sel.any():
                    ids = ids[sel]
                    w = w[sel]
                    w = w / w.sum()
            got = (ids, w, np.cumsum(w))
            self._filter[key] = got
        return got

    def _leaf_boxes(self, node: int) -> list[np.ndarray]:
        """Per parent position, a (k_parent, n_leaves) boolean table: which
        leaves are reachable when that parent takes a given bin. Consistency
        with several known parents is the AND of their rows."""
        got = self._boxes.get(node)
        if got is None:
            tree = self.model.trees[node]
            n_leaves = len(tree.leaves)
            got = [np.zeros((kj, n_leaves), dtype=bool) for kj in tree.k_parents]

            def walk(tn, bounds):
                if isinstance(tn, TreeLeaf):
                    lid = tn.stats.leaf_id
                    for pos, (lo, hi) in enumerate(bounds):
                        got[pos][lo:hi, lid] = True
                    return
                pos = tn.feat_pos
                lo, hi = bounds[pos]
                left = list(bounds)
                left[pos] = (lo, min(hi, tn.split_bin + 1))
                walk(tn.left, left)
                right = list(bounds)
                right[pos] = (max(lo, tn.split_bin + 1), hi)
                walk(tn.right, right)

            walk(tree.root, [(0, kj) for kj in tree.k_parents])
            self._boxes[node] = got
        return got

    def _consistent_leaf_mask(self, node: int, known: tuple) -> np.ndarray:
        boxes = self._leaf_boxes(node)
        pos_of = self._pos_of[node]
        mask = None
        for gj, b in known:
            row = boxes[pos_of[gj]][b]
            mask = row if mask is None else (mask & row)
        return mask

    # --- bin-level sampling ---

    def _assign(self, i, b, bins, dyn, seq):
        bins[i] = int(b)
        seq.append(i)
        if not self.inter_by_node:
            return
        spec = self.disc.features[i]
        for li, op, ri in self.inter_by_node.get(i, ()):
            partner = ri if li == i else li
            if bins[partner] is not None:
                continue
            op_for_partner = flip_op(op) if li == i else op
            pivot = (spec.categories[b] if spec.kind == CATEGORICAL
                     else spec.bin_center(b))
            m = induced_mask(self.disc, partner, op_for_partner, pivot)
            dyn[partner] = m if partner not in dyn else (dyn[partner] & m)

    def _draw_cached(self, i, key, dist_fn, dyn, rng) -> int:
        """Draw a bin for node i from the statically-masked distribution
        identified by ``key`` (cached with its cumulative sums); row-specific
        dynamic masks fall back to the uncached path."""
        entry = self._cum.get(key)
        if entry is None:
            dist = np.asarray(dist_fn(), dtype=np.float64)
            m = self.cc.static_masks.get(i)
            if m is not None:
                dist = np.where(m, dist, 0.0)
            entry = (dist, np.cumsum(dist))
            self._cum[key] = entry
        dist, cum = entry
        if dyn:
            dm = dyn.get(i)
            if dm is not None:
                return masked_sample(dist, dm, rng)
        total = cum[-1]
        if total <= 0.0:
            raise EmptyMaskedDistributionError(
                f"no admissible bin for {self.disc.names[i]!r}")
        return min(int(cum.searchsorted(rng.random() * total, side="right")),
                   len(dist) - 1)

    def _masked_assign(self, i, key, dist_fn, bins, dyn, seq, rng):
        try:
            b = self._draw_cached(i, key, dist_fn, dyn, rng)
        except EmptyMaskedDistributionError as e:
            raise _RowRetry(f"empty masked distribution at {self.disc.names[i]!r}", e)
        self._assign(i, b, bins, dyn, seq)

    def _requirement_hist(self, child: int, parent: int, realized_bin: int,
                          known: tuple = ()) -> np.ndarray:
        """Mixture backward histogram for ``parent`` demanded by a realized child."""
        key = (child, parent, realized_bin, known)
        got = self._req.get(key)
        if got is None:
            tree = self.model.trees[child]
            pos = tree.parent_indices.index(parent)
            ids, w, _ = self._filtered(child, realized_bin, known)
            if len(ids) == 0:
                raise NoFeasibleLeafError(
                    f"no leaf of {self.disc.names[child]!r} is compatible "
                    "with its realized bin")
            h = w @ self._bw_tensors(child)[pos][ids, realized_bin, :]
            got = h / h.sum()
            self._req[key] = got
        return got

    def _backfill_parents(self, i, bins, dyn, seq, rng):
        tree = self.model.trees[i]
        pending = []
        known = []
        for pos, gj in enumerate(tree.parent_indices):
            if bins[gj] is None:
                pending.append((pos, gj))
            else:
                known.append((gj, bins[gj]))
        if not pending:
            return
        known = tuple(known)
        try:
            ids, w, cum = self._filtered(i, bins[i], known)
            if len(ids) == 0:
                raise NoFeasibleLeafError(
                    f"no leaf of {self.disc.names[i]!r} predicts its realized bin")
            pick = min(int(cum.searchsorted(rng.random() * cum[-1], side="right")),
                       len(ids) - 1)
            lid = int(ids[pick])
            tensors = self._bw_tensors(i)
            bi = bins[i]
            for pos, gj in pending:
                realized = [c for c in self.constrained_tree_children[gj]
                            if bins[c] is not None and c != i]
                if realized:
                    sig = ((i, bi),) + tuple(sorted((c, bins[c]) for c in realized))

                    def joint_fn(gj=gj, sig=sig):
                        joint = domain_intersect_parent(
                            [self._requirement_hist(c, gj, b) for c, b in sig])
                        if joint.sum() <= 0:
                            raise InfeasibleIntersectionError(
                                f"children of {self.disc.names[gj]!r} demand "
                                "disjoint domains")
                        return joint

                    self._masked_assign(gj, ("j", gj, sig), joint_fn,
                                        bins, dyn, seq, rng)
                    continue
                known_gj = tuple((p, bins[p]) for p in self.model.trees[gj].parent_indices
                                 if bins[p] is not None)
                if known_gj:
                    # gj's own parents are (partly) set: combine its forward
                    # predictive with the leaf's class-rate likelihood
                    def bayes_fn(pos=pos, gj=gj, known_gj=known_gj):
                        prior = self._forward_predictive(gj, known_gj)
                        return prior * self._likelihood_tensors(i)[pos][lid, bi, :]

                    self._masked_assign(gj, ("p", i, bi, pos, lid, known_gj),
                                        bayes_fn, bins, dyn, seq, rng)
                else:
                    self._masked_assign(gj, ("b", i, bi, pos, lid),
                                        lambda pos=pos: tensors[pos][lid, bi, :],
                                        bins, dyn, seq, rng)
        except (NoFeasibleLeafError, InfeasibleIntersectionError) as e:
            raise _RowRetry(str(e), e)

    def sample_bins(self, rng, mode: str) -> tuple[list, list]:
        bins: list = [None] * self.d
        dyn: dict[int, np.ndarray] = {}
        seq: list[int] = []
        if mode == "backfill":
            for i in self.order_rev:
                if i in self.cc.static_masks and bins[i] is None:
                    tree = self.model.trees[i]
                    self._masked_assign(i, ("m", i), lambda: tree.marginal_predictive,
                                        bins, dyn, seq, rng)
                if bins[i] is not None and self.model.trees[i].parent_indices:
                    self._backfill_parents(i, bins, dyn, seq, rng)
        for i in self.order_fwd:
            if bins[i] is None:
                tree = self.model.trees[i]
                lid = tree.route(bins) if tree.parent_indices else 0
                self._masked_assign(i, ("f", i, lid),
                                    lambda tree=tree, lid=lid: tree.leaf_alpha[lid],
                                    bins, dyn, seq, rng)
        return bins, seq

    def sample_bins_unmasked(self, rng) -> list:
        bins: list = [None] * self.d
        for i in self.order_fwd:
            tree = self.model.trees[i]
            alpha = (tree.alpha_at(tree.route(bins)) if tree.parent_indices
                     else tree.leaf_alpha[0])
            cum = np.cumsum(alpha)
            u = rng.random() * cum[-1]
            bins[i] = min(int(np.searchsorted(cum, u, side="right")), len(alpha) - 1)
        return bins

    # --- raw emission ---

    def _truncated_interval(self, i, b) -> tuple[float, float]:
        key = (i, b)
        got = self._interval.get(key)
        if got is None:
            lo, hi = self.disc.features[i].bin_interval(b)
            bound = self.cc.raw_bounds.get(i)
            if bound is not None:
                blo, _, bhi, _ = bound
                if blo is not None:
                    lo = max(lo, blo)
                if bhi is not None:
                    hi = min(hi, bhi)
            got = (lo, hi)
            self._interval[key] = got
        return got

    def emit_raws(self, bins, seq, rng, constrained: bool = True):
        raw: list = [None] * self.d
        features = self.disc.features
        categorical = self.categorical
        pinned = self.cc.pinned
        inter = self.inter_by_node
        for i in seq:
            b = bins[i]
            if categorical[i]:
                raw[i] = features[i].categories[b]
                continue
            if constrained and i in pinned:
                raw[i] = pinned[i]
                continue
            if constrained:
                lo, hi = self._truncated_interval(i, b)
                partner = self.eq_partner.get(i)
                if partner is not None:
                    if raw[partner] is not None:
                        raw[i] = raw[partner]  # cross-feature equality: copy
                        continue
                    plo, phi = features[partner].bin_interval(bins[partner])
                    lo, hi = max(lo, plo), min(hi, phi)
                if i in inter:
                    for li, op, ri in inter[i]:
                        if op in ("=", "!="):
                            continue
                        other = ri if li == i else li
                        v = raw[other]
                        if v is None:
                            continue
                        my_op = op if li == i else flip_op(op)
                        if my_op in (">", ">="):
                            lo = max(lo, v)
                        else:
                            hi = min(hi, v)
            else:
                lo, hi = features[i].bin_interval(b)
            if hi < lo:
                lo, hi = features[i].bin_interval(b)  # conflicting truncation: plain draw, verify below
            raw[i] = lo if hi <= lo else lo + (hi - lo) * rng.random()
        return raw

    def sample_row_backfill(self, row_idx, rng, mode) -> tuple[list, list, int, int, str | None]:
        retries = 0
        redraws = 0
        last: Exception | None = None
        reason = None
        for _ in range(self.max_retries):
            try:
                bins, seq = self.sample_bins(rng, mode)
            except _RowRetry as e:
                retries += 1
                reason = e.reason
                last = e.cause or e
                continue
            for _ in range(RAW_REDRAW_ATTEMPTS):
                raw = self.emit_raws(bins, seq, rng)
                if row_satisfies(raw, self.cc, self.disc):
                    return bins, raw, retries, redraws, reason
                redraws += 1
            retries += 1
            reason = "raw-level inter-column disagreement"
        if isinstance(last, InfeasibleError):
            raise last
        raise RetriesExhaustedError(
            f"row {row_idx}: {self.max_retries} attempts exhausted"
            + (f" (most recent failure: {reason})" if reason else ""))

    def sample_row_rejection(self, row_idx, rng, cap) -> tuple[list, list, int]:
        for attempt in range(1, cap + 1):
            bins = self.sample_bins_unmasked(rng)
            raw = self.emit_raws(bins, list(range(self.d)), rng, constrained=False)
            if row_satisfies(raw, self.cc, self.disc):
                return bins, raw, attempt
        raise RetriesExhaustedError(
            f"row {row_idx}: no accepted sample within {cap} attempts")


def generate(model: Model, constraints: CompiledConstraints,
             cfg: GenerationConfig) -> tuple[pd.DataFrame, GenerationReport]:
    """Generate ``cfg.n_rows`` rows; returns (DataFrame, report).

    Backfill and forward_only honor masks during sampling and always emit
    satisfying rows. The rejection baseline ignores constraints while
    sampling and accepts rows after the fact, recording attempts/accepted.
    """
    if not cfg.skip_feasibility and (constraints.static_masks or constraints.intercolumn):
        rep = feasibility_check(constraints, model.disc, model.dag)
        if not rep.feasible:
            raise InfeasibleConstraintsError("; ".join(rep.failures))

    sampler = _RowSampler(model, constraints, max_retries=cfg.max_row_retries)
    t0 = time.perf_counter()
    results: list = [None] * cfg.n_rows

    def one_row(idx: int):
        rng = _row_rng(cfg.rng_seed, idx)
        if cfg.mode == "rejection_baseline":
            bins, raw, attempts = sampler.sample_row_rejection(
                idx, rng, cfg.rejection_cap_per_row)
            return raw, attempts, 0, 0, None
        bins, raw, retries, redraws, reason = sampler.sample_row_backfill(
            idx, rng, cfg.mode)
        return raw, 1 + retries, retries, redraws, reason

    if cfg.n_jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.n_jobs) as pool:
            for idx, res in zip(range(cfg.n_rows), pool.map(one_row, range(cfg.n_rows))):
                results[idx] = res
    else:
        for idx in range(cfg.n_rows):
            results[idx] = one_row(idx)

    wall = time.perf_counter() - t0
    rows = [r[0] for r in results]
    attempts = sum(r[1] for r in results)
    retries = sum(r[2] for r in results)
    redraws = sum(r[3] for r in results)
    reasons: dict[str, int] = {}
    for r in results:
        if r[4]:
            reasons[r[4]] = reasons.get(r[4], 0) + 1

    df = pd.DataFrame(rows, columns=model.disc.names)
    cols = [df[c].to_numpy() for c in df.columns]
    csr = float(satisfaction_mask(cols, constraints, model.disc).mean()) \
        if constraints.constraints else 1.0
    report = GenerationReport(
        mode=cfg.mode, n_rows=cfg.n_rows, rng_seed=cfg.rng_seed, csr=csr,
        attempts=attempts, attempts_per_accepted=attempts / cfg.n_rows,
        row_retries=retries, raw_redraws=redraws, wall_time_s=wall,
        retry_reasons=reasons)
    return df, report


def generate_backfill(model, constraints, cfg: GenerationConfig):
    cfg.mode = "backfill"
    return generate(model, constraints, cfg)


def generate_rejection_baseline(model, constraints, cfg: GenerationConfig):
    cfg.mode = "rejection_baseline"
    return generate(model, constraints, cfg)
