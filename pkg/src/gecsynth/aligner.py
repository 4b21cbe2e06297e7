"""Token alignment between an incorrect and a correct sentence.

Damerau-Levenshtein style dynamic program with linguistically weighted
substitution costs: same-lemma and same-pos substitutions come out cheaper
than an insert+delete pair, and adjacent-block transpositions beat double
substitution. Costs are handled internally as integers (hundredths) so that
tie detection is exact.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .core import AnnotatedToken, Edit, Sentence
from .errors import EmptyInputError

MATCH, SUB, INS, DEL, TRANS = "match", "substitute", "insert", "delete", "transpose"

# Backtrace preference among equal-cost predecessors. Putting delete/insert
# before substitute pushes substitutions toward the start of the sentence.
_PRIORITY = (MATCH, TRANS, DEL, INS, SUB)


@dataclass(frozen=True)
class AlignConfig:
    """Alignment costs. Values are token-edit costs; defaults are chosen so
    that same-lemma substitutions out-compete insert+delete and block
    transpositions beat double substitution."""

    insert_cost: float = 1.0
    delete_cost: float = 1.0
    sub_base: float = 1.0
    lemma_discount: float = 0.4
    pos_discount: float = 0.2
    sub_floor: float = 0.2
    transpose_rebate: float = 0.5  # block of length k costs k - rebate
    max_transpose: int = 4

    def scaled(self) -> "_ScaledCosts":
        return _ScaledCosts(
            insert=round(self.insert_cost * 100),
            delete=round(self.delete_cost * 100),
            sub_base=round(self.sub_base * 100),
            lemma=round(self.lemma_discount * 100),
            pos=round(self.pos_discount * 100),
            floor=round(self.sub_floor * 100),
            trans_rebate=round(self.transpose_rebate * 100),
            max_transpose=self.max_transpose,
        )


@dataclass(frozen=True)
class _ScaledCosts:
    insert: int
    delete: int
    sub_base: int
    lemma: int
    pos: int
    floor: int
    trans_rebate: int
    max_transpose: int

    def substitution(self, a: AnnotatedToken, b: AnnotatedToken) -> int:
        cost = self.sub_base
        if a.lemma == b.lemma:
            cost -= self.lemma
        if a.pos == b.pos:
            cost -= self.pos
        return max(cost, self.floor)


DEFAULT_CONFIG = AlignConfig()


@dataclass(frozen=True)
class AlignmentOp:
    kind: str
    src_start: int
    src_end: int
    tgt_start: int
    tgt_end: int

    @property
    def src_span(self) -> tuple[int, int]:
        return (self.src_start, self.src_end)

    @property
    def tgt_span(self) -> tuple[int, int]:
        return (self.tgt_start, self.tgt_end)


def _transpose_lengths(src, tgt, i, j, costs) -> list[int]:
    """Block lengths k for which src[i-k:i] and tgt[j-k:j] are reorderings."""
    out = []
    limit = min(costs.max_transpose, i, j)
    for k in range(2, limit + 1):
        a = [t.surface for t in src[i - k : i]]
        b = [t.surface for t in tgt[j - k : j]]
        if a != b and Counter(a) == Counter(b):
            out.append(k)
    return out


def align(
    source: Sentence, target: Sentence, config: AlignConfig = DEFAULT_CONFIG
) -> list[AlignmentOp]:
    """Minimal-cost alignment of two sentences.

    Ties are broken toward fewer operations, then by a fixed backtrace
    preference that keeps substitutions leftmost.
    """
    if len(source) == 0 or len(target) == 0:
        raise EmptyInputError("cannot align an empty sentence")
    costs = config.scaled()
    src, tgt = source.tokens, target.tokens
    n, m = len(src), len(tgt)

    # table[i][j] = (cost, op count) for aligning src[:i] with tgt[:j]
    table: list[list[tuple[int, int]]] = [[(0, 0)] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        table[i][0] = (i * costs.delete, i)
    for j in range(1, m + 1):
        table[0][j] = (j * costs.insert, j)

    def candidates(i: int, j: int):
        """(kind, pred_i, pred_j, edge_cost) entering cell (i, j)."""
        if i > 0 and j > 0:
            if src[i - 1].surface == tgt[j - 1].surface:
                yield (MATCH, i - 1, j - 1, 0)
            else:
                yield (SUB, i - 1, j - 1, costs.substitution(src[i - 1], tgt[j - 1]))
            for k in _transpose_lengths(src, tgt, i, j, costs):
                yield (TRANS, i - k, j - k, k * 100 - costs.trans_rebate)
        if i > 0:
            yield (DEL, i - 1, j, costs.delete)
        if j > 0:
            yield (INS, i, j - 1, costs.insert)

    for i in range(n + 1):
        for j in range(m + 1):
            if i == 0 and j == 0:
                continue
            best = None
            for _, pi, pj, edge in candidates(i, j):
                prev = table[pi][pj]
                value = (prev[0] + edge, prev[1] + 1)
                if best is None or value < best:
                    best = value
            table[i][j] = best

    ops: list[AlignmentOp] = []
    i, j = n, m
    while i > 0 or j > 0:
        cell = table[i][j]
        step = None
        for kind in _PRIORITY:
            for ckind, pi, pj, edge in candidates(i, j):
                if ckind != kind:
                    continue
                prev = table[pi][pj]
                if (prev[0] + edge, prev[1] + 1) == cell:
                    step = (kind, pi, pj)
                    break
            if step:
                break
        assert step is not None, "backtrace lost the optimal path"
        kind, pi, pj = step
        ops.append(AlignmentOp(kind, pi, i, pj, j))
        i, j = pi, pj
    ops.reverse()
    return ops


def alignment_cost(
    source: Sentence, target: Sentence, config: AlignConfig = DEFAULT_CONFIG
) -> float:
    """Total cost of the minimal alignment, in token-edit units."""
    ops = align(source, target, config)
    costs = config.scaled()
    total = 0
    for op in ops:
        if op.kind == SUB:
            total += costs.substitution(source[op.src_start], target[op.tgt_start])
        elif op.kind == DEL:
            total += costs.delete
        elif op.kind == INS:
            total += costs.insert
        elif op.kind == TRANS:
            total += (op.src_end - op.src_start) * 100 - costs.trans_rebate
    return total / 100.0


# ---------------------------------------------------------------------------
# Edit extraction and merging.
# ---------------------------------------------------------------------------


def _lemmas(tokens) -> set[str]:
    return {t.lemma for t in tokens}


def _touches_punct(src, tgt, ops) -> bool:
    for op in ops:
        for tok in list(src[op.src_start : op.src_end]) + list(tgt[op.tgt_start : op.tgt_end]):
            if tok.pos == "PUNCT":
                return True
    return False


def _shared_lemma_sub(src, tgt, op) -> bool:
    if op.kind != SUB:
        return False
    return bool(
        _lemmas(src[op.src_start : op.src_end]) & _lemmas(tgt[op.tgt_start : op.tgt_end])
    )


def _should_merge(src, tgt, group: list[AlignmentOp], op: AlignmentOp) -> bool:
    # (a) both sides of the boundary touch punctuation
    if _touches_punct(src, tgt, group) and _touches_punct(src, tgt, [op]):
        return True
    # (b) the merged source and target spans share a lemma
    merged = group + [op]
    src_lem = set()
    tgt_lem = set()
    for o in merged:
        src_lem |= _lemmas(src[o.src_start : o.src_end])
        tgt_lem |= _lemmas(tgt[o.tgt_start : o.tgt_end])
    if src_lem & tgt_lem:
        return True
    # (c) insert/delete adjacent to a substitution over the same lemma
    last = group[-1]
    if op.kind in (INS, DEL) and _shared_lemma_sub(src, tgt, last):
        return True
    if last.kind in (INS, DEL) and _shared_lemma_sub(src, tgt, op):
        return True
    return False


def extract_edits(
    ops: list[AlignmentOp], source: Sentence, target: Sentence
) -> list[Edit]:
    """Turn non-match alignment ops into edits, merging adjacent ones.

    Transpositions become standalone word-order edits and never merge.
    Returned edits are untagged, sorted by source span, non-overlapping.
    """
    src, tgt = source.tokens, target.tokens
    edits: list[Edit] = []
    group: list[AlignmentOp] = []

    def flush():
        if not group:
            return
        first, last = group[0], group[-1]
        replacement = tuple(t.surface for t in tgt[first.tgt_start : last.tgt_end])
        edits.append(Edit(first.src_start, last.src_end, replacement))
        group.clear()

    for op in ops:
        if op.kind == MATCH:
            flush()
        elif op.kind == TRANS:
            flush()
            replacement = tuple(t.surface for t in tgt[op.tgt_start : op.tgt_end])
            edits.append(Edit(op.src_start, op.src_end, replacement))
        else:
            if group and not _should_merge(src, tgt, group, op):
                flush()
            group.append(op)
    flush()
    return edits
