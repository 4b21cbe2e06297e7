"""Rule-based classification of extracted edits into the 24 error categories.

Rules are ordered, first match wins, and the final rule is an unconditional
fallback to OTHER, so classification is total. The rule table below is the
normative definition of each category for this toolkit; see the README for a
prose description.
"""

from __future__ import annotations

from collections import Counter

from . import morph
from .aligner import AlignConfig, DEFAULT_CONFIG, align, extract_edits
from .core import (
    DEFAULT_INVENTORY,
    AnnotatedToken,
    Edit,
    ErrorTag,
    ParallelPair,
    Sentence,
    TagInventory,
)
from .tokenizer import Annotator, default_annotator

# Symmetric contraction pairs (clitic, full form).
CONTRACTION_PAIRS = frozenset(
    {
        ("n't", "not"),
        ("'m", "am"),
        ("'re", "are"),
        ("'ve", "have"),
        ("'ll", "will"),
        ("'d", "would"),
        ("'d", "had"),
        ("'s", "is"),
        ("'s", "has"),
    }
)

# Multi-token contraction expansions whose halves do not align one-to-one.
CONTRACTION_PHRASES = frozenset(
    {
        (("ca", "n't"), ("can", "not")),
        (("wo", "n't"), ("will", "not")),
        (("cannot",), ("can", "not")),
    }
)

POSSESSIVE_MARKERS = frozenset({"'s", "'"})

# Tag assigned to a pure insertion/deletion, keyed by the token's pos.
_INS_DEL_TAGS = {
    "NOUN": "NOUN",
    "VERB": "VERB",
    "ADJ": "ADJ",
    "ADV": "ADV",
    "DET": "DET",
    "PREP": "PREP",
    "PRON": "PRON",
    "CONJ": "CONJ",
    "PART": "PART",
    "PUNCT": "PUNCT",
}

# Same-pos single-token substitutions map straight to the pos-named tag.
_DISPATCH_POS = frozenset(
    {"DET", "PREP", "PRON", "ADJ", "ADV", "CONJ", "PART", "NOUN", "VERB"}
)


def _char_distance(a: str, b: str, limit: int = 3) -> int:
    """Levenshtein distance, capped at ``limit`` (banded DP)."""
    if abs(len(a) - len(b)) > limit:
        return limit + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if min(cur) > limit:
            return limit + 1
        prev = cur
    return prev[-1]


class RuleTable:
    """Ordered classification rules over (source span, replacement) pairs."""

    def __init__(
        self,
        annotator: Annotator | None = None,
        inventory: TagInventory = DEFAULT_INVENTORY,
    ):
        self.annotator = annotator or default_annotator()
        self.inventory = inventory
        self.rules = (
            self._word_order,
            self._punctuation,
            self._orthography,
            self._contraction,
            self._noun_number,
            self._noun_possessive,
            self._noun_inflection,
            self._verb,
            self._adjective_form,
            self._pos_dispatch,
            self._morphology,
            self._spelling,
            self._insertion_deletion,
        )

    # -- public API ---------------------------------------------------------

    def classify(self, edit: Edit, source: Sentence, target: Sentence) -> ErrorTag:
        src = source.tokens[edit.start : edit.end]
        tgt = tuple(self.annotator.annotate(s) for s in edit.replacement)
        left = source.tokens[edit.start - 1] if edit.start > 0 else None
        for rule in self.rules:
            name = rule(src, tgt, left)
            if name is not None:
                return self.inventory.by_name(name)
        return self.inventory.by_name("OTHER")

    # -- rules, in precedence order ------------------------------------------

    @staticmethod
    def _word_order(src, tgt, left):
        if len(src) >= 2 and len(src) == len(tgt):
            a = [t.surface for t in src]
            b = [t.surface for t in tgt]
            if a != b and Counter(a) == Counter(b):
                return "WO"
        return None

    @staticmethod
    def _punctuation(src, tgt, left):
        tokens = list(src) + list(tgt)
        if tokens and all(t.pos == "PUNCT" for t in tokens):
            return "PUNCT"
        return None

    @staticmethod
    def _orthography(src, tgt, left):
        if not src or not tgt:
            return None
        a = " ".join(t.surface for t in src).lower()
        b = " ".join(t.surface for t in tgt).lower()
        if a == b:
            return "ORTH"
        strip = str.maketrans("", "", " -")
        if a.translate(strip) == b.translate(strip):
            return "ORTH"
        return None

    @staticmethod
    def _contraction(src, tgt, left):
        a = tuple(t.surface.lower() for t in src)
        b = tuple(t.surface.lower() for t in tgt)
        if (a, b) in CONTRACTION_PHRASES or (b, a) in CONTRACTION_PHRASES:
            return "CONTR"
        if len(src) == 1 and len(tgt) == 1:
            pair = (a[0], b[0])
            if pair in CONTRACTION_PAIRS or pair[::-1] in CONTRACTION_PAIRS:
                return "CONTR"
        return None

    @staticmethod
    def _noun_number(src, tgt, left):
        if len(src) == 1 and len(tgt) == 1:
            s, t = src[0], tgt[0]
            if s.pos == "NOUN" and t.pos == "NOUN" and s.lemma == t.lemma:
                ns = morph.noun_number(s.surface, s.lemma)
                nt = morph.noun_number(t.surface, t.lemma)
                if ns and nt and ns != nt:
                    return "NOUN:NUM"
        return None

    @staticmethod
    def _noun_possessive(src, tgt, left):
        a = [t.surface.lower() for t in src]
        b = [t.surface.lower() for t in tgt]
        # insertion or deletion of a possessive clitic next to a noun
        if not src and all(s in POSSESSIVE_MARKERS for s in b):
            if left is not None and left.pos == "NOUN":
                return "NOUN:POSS"
        if not tgt and all(s in POSSESSIVE_MARKERS for s in a):
            if left is not None and left.pos == "NOUN":
                return "NOUN:POSS"
        # "dog 's" <-> "dogs" style alternation
        for xs, ys in ((src, tgt), (tgt, src)):
            if (
                len(xs) == 2
                and xs[1].surface.lower() in POSSESSIVE_MARKERS
                and xs[0].pos == "NOUN"
                and len(ys) == 1
                and ys[0].pos == "NOUN"
                and ys[0].lemma == xs[0].lemma
            ):
                return "NOUN:POSS"
        if a and b and set(a) & POSSESSIVE_MARKERS and set(b) & POSSESSIVE_MARKERS:
            return "NOUN:POSS"
        return None

    def _noun_inflection(self, src, tgt, left):
        if len(src) == 1 and len(tgt) == 1:
            for x, y in ((src[0], tgt[0]), (tgt[0], src[0])):
                if (
                    x.pos == "NOUN"
                    and y.pos == "NOUN"
                    and not self.annotator.is_word(x.surface)
                    and x.lemma == y.lemma
                    and x.lemma in self.annotator.entries
                ):
                    return "NOUN:INFL"
        return None

    def _verb(self, src, tgt, left):
        if not src or not tgt:
            return None
        if not all(t.pos == "VERB" for t in list(src) + list(tgt)):
            return None
        if len(src) == 1 and len(tgt) == 1:
            s, t = src[0], tgt[0]
            if s.lemma != t.lemma:
                return None
            if not self.annotator.is_word(s.surface) or not self.annotator.is_word(t.surface):
                return "VERB:INFL"
            return self._verb_form_tag(s, t)
        # periphrastic alternation like "has eaten" <-> "ate"
        if _lemma_set(src) & _lemma_set(tgt):
            return "VERB:TENSE"
        return None

    @staticmethod
    def _verb_form_tag(s: AnnotatedToken, t: AnnotatedToken):
        pair = {s.surface.lower(), t.surface.lower()}
        if pair == {"was", "were"}:
            return "VERB:SVA"
        fs = morph.verb_forms(s.surface, s.lemma)
        ft = morph.verb_forms(t.surface, t.lemma)
        if (morph.BASE in fs and morph.THIRD_SG in ft) or (
            morph.THIRD_SG in fs and morph.BASE in ft
        ):
            return "VERB:SVA"
        if morph.GERUND in fs or morph.GERUND in ft:
            return "VERB:FORM"
        past = {morph.PAST, morph.PAST_PART}
        if (fs & past) or (ft & past):
            return "VERB:TENSE"
        return "VERB:FORM"

    @staticmethod
    def _adjective_form(src, tgt, left):
        if len(src) == 1 and len(tgt) == 1:
            s, t = src[0], tgt[0]
            if s.pos == "ADJ" and t.pos == "ADJ" and s.lemma == t.lemma:
                graded = (morph.comparative(s.lemma), morph.superlative(s.lemma))
                if s.surface.lower() in graded or t.surface.lower() in graded:
                    return "ADJ:FORM"
        return None

    def _pos_dispatch(self, src, tgt, left):
        # word-choice errors between real words; nonwords fall through to SPELL
        if len(src) == 1 and len(tgt) == 1:
            pos = src[0].pos
            if (
                pos == tgt[0].pos
                and pos in _DISPATCH_POS
                and self.annotator.is_word(src[0].surface)
                and self.annotator.is_word(tgt[0].surface)
            ):
                return pos
        return None

    @staticmethod
    def _morphology(src, tgt, left):
        if len(src) == 1 and len(tgt) == 1:
            s, t = src[0], tgt[0]
            if s.lemma == t.lemma and s.pos != t.pos:
                return "MORPH"
            a, b = s.surface.lower(), t.surface.lower()
            if a == b + "ly" or b == a + "ly":
                return "MORPH"
        return None

    def _spelling(self, src, tgt, left):
        if len(src) == 1 and len(tgt) == 1:
            s, t = src[0], tgt[0]
            for x, y in ((s, t), (t, s)):
                if not self.annotator.is_word(x.surface) and self.annotator.is_word(y.surface):
                    if _char_distance(x.surface.lower(), y.surface.lower()) <= 2:
                        return "SPELL"
        return None

    @staticmethod
    def _insertion_deletion(src, tgt, left):
        tokens = src if src and not tgt else tgt if tgt and not src else ()
        if tokens:
            poses = {t.pos for t in tokens}
            if len(poses) == 1:
                return _INS_DEL_TAGS.get(poses.pop())
        return None


def _lemma_set(tokens) -> set[str]:
    return {t.lemma for t in tokens}


_DEFAULT_TABLE: RuleTable | None = None


def default_rule_table() -> RuleTable:
    global _DEFAULT_TABLE
    if _DEFAULT_TABLE is None:
        _DEFAULT_TABLE = RuleTable()
    return _DEFAULT_TABLE


def classify_edit(
    edit: Edit,
    source: Sentence,
    target: Sentence,
    table: RuleTable | None = None,
) -> ErrorTag:
    """Assign exactly one error tag to an extracted edit."""
    return (table or default_rule_table()).classify(edit, source, target)


def annotate_pair(
    pair: ParallelPair,
    table: RuleTable | None = None,
    config: AlignConfig = DEFAULT_CONFIG,
) -> ParallelPair:
    """align -> extract_edits -> classify_edit; returns the pair with typed edits."""
    table = table or default_rule_table()
    ops = align(pair.source, pair.target, config)
    edits = extract_edits(ops, pair.source, pair.target)
    typed = tuple(
        e.with_tag(table.classify(e, pair.source, pair.target)) for e in edits
    )
    return ParallelPair(pair.source, pair.target, typed)
