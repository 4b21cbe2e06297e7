"""Evaluation: F-beta arithmetic, multi-label tagging scores, edit-level
correction scoring, and corpus BLEU.

Scores are percentages (0..100) reported to two decimals, and the edit-level
scorer is built on this toolkit's own annotator, so its absolute numbers are
not comparable with other scorers' outputs.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .classifier import RuleTable, annotate_pair
from .core import ParallelPair, Sentence, TagSet
from .errors import DataError, EmptyInputError


@dataclass(frozen=True)
class ConfusionCounts:
    true_positive: int = 0
    false_positive: int = 0
    false_negative: int = 0

    def __post_init__(self):
        if min(self.true_positive, self.false_positive, self.false_negative) < 0:
            raise ValueError("confusion counts must be non-negative")

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            self.true_positive + other.true_positive,
            self.false_positive + other.false_positive,
            self.false_negative + other.false_negative,
        )

    def precision(self) -> float:
        denom = self.true_positive + self.false_positive
        return 100.0 * self.true_positive / denom if denom else 0.0

    def recall(self) -> float:
        denom = self.true_positive + self.false_negative
        return 100.0 * self.true_positive / denom if denom else 0.0


def f_beta(precision: float, recall: float, beta: float = 0.5) -> float:
    """F-beta from precision/recall percentages; beta < 1 favors precision."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if precision == 0 and recall == 0:
        return 0.0
    b2 = beta * beta
    return (1 + b2) * precision * recall / (b2 * precision + recall)


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f05: float
    per_tag: dict[str, ConfusionCounts] = field(default_factory=dict, compare=False)

    def as_dict(self) -> dict:
        out = {
            "precision": round(self.precision, 2),
            "recall": round(self.recall, 2),
            "f05": round(self.f05, 2),
        }
        if self.per_tag:
            out["per_tag"] = {
                name: {
                    "tp": c.true_positive,
                    "fp": c.false_positive,
                    "fn": c.false_negative,
                    "precision": round(c.precision(), 2),
                    "recall": round(c.recall(), 2),
                    "f05": round(f_beta(c.precision(), c.recall()), 2),
                }
                for name, c in sorted(self.per_tag.items())
            }
        return out


def _score_from_counts(total: ConfusionCounts, per_tag: dict[str, ConfusionCounts]) -> Score:
    p, r = total.precision(), total.recall()
    return Score(p, r, f_beta(p, r), per_tag)


def multilabel_score(gold: list[TagSet], pred: list[TagSet]) -> Score:
    """Micro-averaged P/R/F0.5 over all (instance, tag) decisions."""
    if len(gold) != len(pred):
        raise DataError(f"gold/pred length mismatch: {len(gold)} vs {len(pred)}")
    per_tag: dict[str, ConfusionCounts] = {}
    total = ConfusionCounts()
    for g, p in zip(gold, pred):
        for tag in p:
            hit = tag in g
            c = ConfusionCounts(true_positive=int(hit), false_positive=int(not hit))
            per_tag[tag.name] = per_tag.get(tag.name, ConfusionCounts()) + c
            total = total + c
        for tag in g:
            if tag not in p:
                c = ConfusionCounts(false_negative=1)
                per_tag[tag.name] = per_tag.get(tag.name, ConfusionCounts()) + c
                total = total + c
    return _score_from_counts(total, per_tag)


def gec_score(
    system: list[Sentence],
    sources: list[Sentence],
    references: list[Sentence],
    table: RuleTable | None = None,
) -> Score:
    """Edit-level correction score.

    Gold edits come from aligning source with reference, system edits from
    aligning source with the system output; an edit counts as correct when
    span, replacement, and tag all agree.
    """
    if not (len(system) == len(sources) == len(references)):
        raise DataError("system/sources/references must have equal lengths")
    per_tag: dict[str, ConfusionCounts] = {}
    total = ConfusionCounts()

    def keyed(pair: ParallelPair) -> Counter:
        annotated = annotate_pair(pair, table)
        return Counter((e.start, e.end, e.replacement, e.tag.name) for e in annotated.edits)

    for out, src, ref in zip(system, sources, references):
        gold = keyed(ParallelPair(src, ref))
        hyp = keyed(ParallelPair(src, out))
        for key, count in hyp.items():
            matched = min(count, gold.get(key, 0))
            c = ConfusionCounts(true_positive=matched, false_positive=count - matched)
            per_tag[key[3]] = per_tag.get(key[3], ConfusionCounts()) + c
            total = total + c
        for key, count in gold.items():
            missed = count - min(count, hyp.get(key, 0))
            if missed:
                c = ConfusionCounts(false_negative=missed)
                per_tag[key[3]] = per_tag.get(key[3], ConfusionCounts()) + c
                total = total + c
    return _score_from_counts(total, per_tag)


# ---------------------------------------------------------------------------
# Corpus BLEU.
# ---------------------------------------------------------------------------


def _ngrams(surfaces: tuple[str, ...], n: int) -> Counter:
    return Counter(surfaces[i : i + n] for i in range(len(surfaces) - n + 1))


def modified_ngram_counts(
    hypotheses: list[Sentence], references: list[Sentence], n: int
) -> tuple[int, int]:
    """(clipped matches, hypothesis n-gram total) summed over the corpus."""
    matches = 0
    total = 0
    for hyp, ref in zip(hypotheses, references):
        hyp_counts = _ngrams(hyp.surfaces(), n)
        ref_counts = _ngrams(ref.surfaces(), n)
        matches += sum(min(c, ref_counts.get(g, 0)) for g, c in hyp_counts.items())
        total += sum(hyp_counts.values())
    return matches, total


def bleu(hypotheses: list[Sentence], references: list[Sentence]) -> float:
    """Corpus BLEU-4 in [0, 100].

    Modified n-gram precisions with add-one smoothing for n >= 2 and a
    brevity penalty applied when the hypothesis side is shorter overall.
    """
    if not hypotheses or not references:
        raise EmptyInputError("BLEU needs a non-empty corpus")
    if len(hypotheses) != len(references):
        raise DataError("hypothesis/reference length mismatch")
    log_sum = 0.0
    for n in range(1, 5):
        matches, total = modified_ngram_counts(hypotheses, references, n)
        if n == 1:
            if matches == 0 or total == 0:
                return 0.0
            precision = matches / total
        else:
            precision = (matches + 1) / (total + 1)
        log_sum += math.log(precision)
    hyp_len = sum(len(h) for h in hypotheses)
    ref_len = sum(len(r) for r in references)
    brevity = math.exp(1 - ref_len / hyp_len) if hyp_len < ref_len else 1.0
    return 100.0 * brevity * math.exp(log_sum / 4)
