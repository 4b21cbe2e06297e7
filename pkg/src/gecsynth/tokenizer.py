"""Rule-based tokenizer and lightweight POS/lemma annotator.

The pipeline has no runtime model dependencies: tokenization is whitespace
splitting plus punctuation detachment and English clitic splitting, and
annotation is lexicon lookup backed by suffix rules. Accuracy targets are
modest by design; downstream rules degrade to OTHER on annotation misses.
"""

from __future__ import annotations

import importlib.resources
from pathlib import Path

from . import morph
from .core import AnnotatedToken, Sentence
from .errors import EmptyInputError, ParseError

# Clitics split into their own tokens; "can't" -> "ca" + "n't" (Penn style).
CLITICS = ("'s", "'m", "'re", "'ve", "'ll", "'d")

_PUNCT_CHARS = set(".,;:!?\"'`()[]{}-…*<>")
_PROTECTED = {"n't", "...", "--", "''", "``"} | set(CLITICS)

# (suffix, guessed pos); applied in order after lexicon and inflection lookup.
SUFFIX_POS_RULES = (
    ("ly", "ADV"),
    ("tion", "NOUN"),
    ("sion", "NOUN"),
    ("ment", "NOUN"),
    ("ness", "NOUN"),
    ("ity", "NOUN"),
    ("ance", "NOUN"),
    ("ence", "NOUN"),
    ("ship", "NOUN"),
    ("hood", "NOUN"),
    ("ous", "ADJ"),
    ("ful", "ADJ"),
    ("ive", "ADJ"),
    ("able", "ADJ"),
    ("ible", "ADJ"),
    ("ish", "ADJ"),
    ("ic", "ADJ"),
    ("al", "ADJ"),
    ("ing", "VERB"),
    ("ed", "VERB"),
)


def default_lexicon_path() -> Path:
    return Path(str(importlib.resources.files("gecsynth") / "data" / "lexicon.tsv"))


def _read_lexicon(path: Path) -> dict[str, tuple[str, str]]:
    entries: dict[str, tuple[str, str]] = {}
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ParseError(f"lexicon entry needs 3 tab-separated fields", line=lineno)
            word, pos, lemma = parts
            entries.setdefault(word.lower(), (pos, lemma.lower()))
    return entries


class Annotator:
    """Immutable-after-load lexicon with tokenize/annotate operations.

    Every listed verb contributes its 3sg/past/participle/gerund forms and
    every irregular noun its plural, so e.g. "bought" and "children" resolve
    without suffix rules. Lookup is case-insensitive; lemmas are lowercase.
    """

    def __init__(self, lexicon_path: str | Path | None = None):
        path = Path(lexicon_path) if lexicon_path else default_lexicon_path()
        self.lexicon_path = path
        entries = _read_lexicon(path)
        self._base_entries = dict(entries)
        for word, (pos, lemma) in list(entries.items()):
            if pos == "VERB" and word == lemma:
                for form in (
                    morph.verb_3sg(word),
                    morph.verb_past(word),
                    morph.verb_past_participle(word),
                    morph.verb_gerund(word),
                ):
                    entries.setdefault(form, ("VERB", lemma))
            elif pos == "NOUN" and word in morph.IRREGULAR_PLURALS:
                entries.setdefault(morph.IRREGULAR_PLURALS[word], ("NOUN", lemma))
        self.entries = entries
        self._cache: dict[str, tuple[str, str, bool]] = {}

    # -- annotation ---------------------------------------------------------

    def lookup(self, surface: str) -> tuple[str, str, bool]:
        """(pos, lemma, known) for a surface form.

        ``known`` is True for exact lexicon words and valid inflections of
        them; suffix-guessed entries report False, which is what the SPELL
        and *:INFL classifier rules key on.
        """
        cached = self._cache.get(surface)
        if cached is None:
            cached = self._lookup_uncached(surface)
            self._cache[surface] = cached
        return cached

    def _lookup_uncached(self, surface: str) -> tuple[str, str, bool]:
        w = surface.lower()
        entry = self.entries.get(w)
        if entry is not None:
            return entry[0], entry[1], True

        if any(c.isdigit() for c in w):
            return "NUM", w, True

        hit = self._inflection_lookup(w)
        if hit is not None:
            return hit[0], hit[1], True

        return self._guess(surface, w)

    def _inflection_lookup(self, w: str) -> tuple[str, str] | None:
        # Regular noun plural.
        sing = morph.singularize_noun(w)
        if sing is not None:
            entry = self.entries.get(sing)
            if entry and entry[0] == "NOUN" and morph.pluralize_noun(entry[1]) == w:
                return "NOUN", entry[1]
        # Verb inflections: 3sg, -ed, -ing.
        for cand in self._stem_candidates(w):
            entry = self.entries.get(cand)
            if not entry or entry[0] != "VERB" or entry[1] != cand:
                continue
            if w in (
                morph.verb_3sg(cand),
                morph.verb_past(cand),
                morph.verb_past_participle(cand),
                morph.verb_gerund(cand),
            ):
                return "VERB", cand
        # Adjective comparative/superlative.
        base = morph.adjective_base(w)
        if base is not None:
            entry = self.entries.get(base)
            if entry and entry[0] == "ADJ":
                if w in (morph.comparative(base), morph.superlative(base)):
                    return "ADJ", entry[1]
        return None

    @staticmethod
    def _stem_candidates(w: str) -> list[str]:
        cands = []
        if len(w) > 2:
            cands.extend((w[:-1], w[:-2]))
        if len(w) > 3:
            cands.append(w[:-3])
            cands.append(w[:-3] + "e")
            if w.endswith(("ied", "ies")):
                cands.append(w[:-3] + "y")
            if w.endswith("ing"):
                cands.append(w[:-4] + "e" if len(w) > 4 else w)
        if len(w) > 4 and w[-3] == w[-4]:
            cands.append(w[:-4])  # doubled consonant: stopped -> stop
        return [c for c in cands if c]

    def _guess(self, surface: str, w: str) -> tuple[str, str, bool]:
        """Suffix-rule fallback for unknown words; never fails."""
        if w not in morph.STRIP_EXCEPTIONS:
            for suffix, pos in SUFFIX_POS_RULES:
                if w.endswith(suffix) and len(w) > len(suffix) + 1:
                    return pos, self._best_effort_lemma(w, pos), False
            if w.endswith("s") and not w.endswith("ss") and len(w) > 2:
                return "NOUN", self._best_effort_lemma(w, "NOUN"), False
        if surface[:1].isupper():
            return "NOUN", w, False
        return "OTHER", w, False

    def _best_effort_lemma(self, w: str, pos: str) -> str:
        """Strip an inflectional suffix when the stem is a lexicon word.

        Misinflections like "childs" or "goed" get the intended lemma even
        though the surface is a nonword.
        """
        if pos == "NOUN":
            cands = [morph.singularize_noun(w) or ""]
        elif pos == "VERB":
            cands = self._stem_candidates(w)
        else:
            return w
        for cand in cands:
            if cand and cand in self.entries:
                return self.entries[cand][1]
        return w

    def is_word(self, surface: str) -> bool:
        return self.lookup(surface)[2]

    def annotate(self, token: str, context: tuple[str, ...] = ()) -> AnnotatedToken:
        """Annotate one token. ``context`` is accepted for API stability but
        the current rules are context-free."""
        if not token:
            raise EmptyInputError("cannot annotate an empty token")
        pos, lemma, _ = self.lookup(token)
        return AnnotatedToken(token, pos, lemma)

    # -- tokenization -------------------------------------------------------

    def tokenize(self, text: str) -> Sentence:
        """Split raw text into an annotated Sentence.

        Whitespace split, then punctuation detachment and clitic splitting.
        Already-tokenized text (tokens space-separated) is a fixed point.
        """
        if not text or not text.strip():
            raise EmptyInputError("cannot tokenize empty or whitespace-only text")
        surfaces: list[str] = []
        for chunk in text.split():
            surfaces.extend(_split_chunk(chunk))
        return Sentence(tuple(self.annotate(s) for s in surfaces))

    def retokenize(self, surfaces: list[str]) -> Sentence:
        """Annotate an already-final token sequence (no splitting)."""
        return Sentence(tuple(self.annotate(s) for s in surfaces))


def _split_chunk(chunk: str) -> list[str]:
    pre: list[str] = []
    post: list[str] = []
    while len(chunk) > 1 and chunk not in _PROTECTED and chunk[0] in _PUNCT_CHARS:
        pre.append(chunk[0])
        chunk = chunk[1:]
    while len(chunk) > 1 and chunk not in _PROTECTED:
        if chunk.endswith("...") and len(chunk) > 3:
            post.append("...")
            chunk = chunk[:-3]
        elif chunk[-1] in _PUNCT_CHARS and not _ends_with_clitic(chunk):
            post.append(chunk[-1])
            chunk = chunk[:-1]
        else:
            break
    parts = _split_clitics(chunk)
    return pre + parts + post[::-1]


def _ends_with_clitic(chunk: str) -> bool:
    low = chunk.lower()
    return any(low.endswith(c) and len(low) > len(c) for c in CLITICS)


def _split_clitics(chunk: str) -> list[str]:
    low = chunk.lower()
    if low in _PROTECTED:
        return [chunk]
    if low.endswith("n't") and len(chunk) > 3:
        return [chunk[:-3], chunk[-3:]]
    for clitic in CLITICS:
        if low.endswith(clitic) and len(chunk) > len(clitic):
            cut = len(chunk) - len(clitic)
            return [chunk[:cut], chunk[cut:]]
    return [chunk]


_DEFAULT: Annotator | None = None


def default_annotator() -> Annotator:
    """Shared annotator over the bundled lexicon (loaded once per process)."""
    global _DEFAULT
    if _DEFAULT is None:
        _DEFAULT = Annotator()
    return _DEFAULT
