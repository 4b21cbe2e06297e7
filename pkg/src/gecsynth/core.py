"""Core value types: error tags, sentences, edits, datasets, and their I/O.

Everything here is immutable after construction and safe to share across
worker processes. The 24-entry tag inventory defined in DEFAULT_TAG_NAMES is
the canonical ordering used by the corruption prefix codec; a different
inventory can be passed wherever a ``TagInventory`` is accepted.
"""

from __future__ import annotations

import json
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass, field

from .errors import ParseError

# Main error categories, alphabetical. Index order is load-bearing: position i
# of the a/b prefix string corresponds to DEFAULT_TAG_NAMES[i].
DEFAULT_TAG_NAMES = (
    "ADJ",
    "ADJ:FORM",
    "ADV",
    "CONJ",
    "CONTR",
    "DET",
    "MORPH",
    "NOUN",
    "NOUN:INFL",
    "NOUN:NUM",
    "NOUN:POSS",
    "ORTH",
    "OTHER",
    "PART",
    "PREP",
    "PRON",
    "PUNCT",
    "SPELL",
    "VERB",
    "VERB:FORM",
    "VERB:INFL",
    "VERB:SVA",
    "VERB:TENSE",
    "WO",
)

# Coarse part-of-speech labels assigned by the annotator (closed set).
POS_LABELS = frozenset(
    {"NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "PREP", "CONJ", "PART", "PUNCT", "NUM", "OTHER"}
)


@dataclass(frozen=True, order=True)
class ErrorTag:
    """One of the error categories, identified by its inventory position."""

    index: int
    name: str


class TagInventory:
    """Ordered collection of error tags; order defines prefix-codec positions."""

    def __init__(self, names: Sequence[str] = DEFAULT_TAG_NAMES):
        if len(set(names)) != len(names):
            raise ValueError("tag names must be unique")
        self.tags = tuple(ErrorTag(i, name) for i, name in enumerate(names))
        self._by_name = {t.name: t for t in self.tags}

    def __len__(self) -> int:
        return len(self.tags)

    def __iter__(self) -> Iterator[ErrorTag]:
        return iter(self.tags)

    def __getitem__(self, index: int) -> ErrorTag:
        return self.tags[index]

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TagInventory) and self.names() == other.names()

    def by_name(self, name: str) -> ErrorTag:
        try:
            return self._by_name[name]
        except KeyError:
            raise KeyError(f"unknown error tag {name!r}") from None

    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self.tags)


DEFAULT_INVENTORY = TagInventory()


class TagSet:
    """Immutable set of error tags. Empty means "no error" (noop)."""

    __slots__ = ("tags",)

    def __init__(self, tags: Iterable[ErrorTag] = ()):
        object.__setattr__(self, "tags", frozenset(tags))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("TagSet is immutable")

    def __contains__(self, tag: ErrorTag) -> bool:
        return tag in self.tags

    def __iter__(self) -> Iterator[ErrorTag]:
        return iter(sorted(self.tags))

    def __len__(self) -> int:
        return len(self.tags)

    def __bool__(self) -> bool:
        return bool(self.tags)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, TagSet) and self.tags == other.tags

    def __hash__(self) -> int:
        return hash(self.tags)

    def __repr__(self) -> str:
        return "TagSet({%s})" % ", ".join(t.name for t in self)

    def with_tag(self, tag: ErrorTag) -> "TagSet":
        return TagSet(self.tags | {tag})

    def names(self) -> tuple[str, ...]:
        return tuple(t.name for t in self)

    def indices(self) -> tuple[int, ...]:
        return tuple(t.index for t in self)

    def membership(self, inventory: TagInventory = DEFAULT_INVENTORY) -> tuple[bool, ...]:
        """Boolean vector over the inventory, in canonical index order."""
        present = {t.index for t in self.tags}
        return tuple(i in present for i in range(len(inventory)))

    @classmethod
    def from_names(cls, names: Iterable[str], inventory: TagInventory = DEFAULT_INVENTORY) -> "TagSet":
        return cls(inventory.by_name(n) for n in names)


@dataclass(frozen=True)
class AnnotatedToken:
    surface: str
    pos: str
    lemma: str

    def __post_init__(self):
        if not self.surface:
            raise ValueError("token surface must be non-empty")
        if any(c.isspace() for c in self.surface):
            raise ValueError(f"token surface may not contain whitespace: {self.surface!r}")
        if self.pos not in POS_LABELS:
            raise ValueError(f"unknown pos label {self.pos!r}")
        if self.lemma != self.lemma.lower():
            raise ValueError(f"lemma must be lowercase: {self.lemma!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[AnnotatedToken, ...]

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[AnnotatedToken]:
        return iter(self.tokens)

    def __getitem__(self, i):
        return self.tokens[i]

    def surfaces(self) -> tuple[str, ...]:
        return tuple(t.surface for t in self.tokens)

    def text(self) -> str:
        """Single-line rendering; tokenizing it again recovers the same tokens."""
        return " ".join(t.surface for t in self.tokens)


@dataclass(frozen=True)
class Edit:
    """Span transformation: replace source[start:end] with ``replacement``.

    ``replacement`` holds target-side surfaces. An empty span with a
    non-empty replacement is an insertion; a non-empty span with an empty
    replacement is a deletion. ``tag`` is None until classified.
    """

    start: int
    end: int
    replacement: tuple[str, ...]
    tag: ErrorTag | None = None

    def __post_init__(self):
        object.__setattr__(self, "replacement", tuple(self.replacement))
        if not (0 <= self.start <= self.end):
            raise ValueError(f"invalid edit span [{self.start}, {self.end})")
        if self.start == self.end and not self.replacement:
            raise ValueError("edit may not have both an empty span and an empty replacement")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def with_tag(self, tag: ErrorTag) -> "Edit":
        return Edit(self.start, self.end, self.replacement, tag)


@dataclass(frozen=True)
class ParallelPair:
    """An (incorrect, correct) sentence pair, optionally with typed edits."""

    source: Sentence
    target: Sentence
    edits: tuple[Edit, ...] | None = None

    def __post_init__(self):
        if self.edits is not None:
            object.__setattr__(self, "edits", tuple(self.edits))

    def is_noop(self) -> bool:
        if self.edits is None:
            raise ValueError("pair has no computed edits")
        return len(self.edits) == 0


def apply_edits(source: Sentence, edits: Sequence[Edit], annotate) -> Sentence:
    """Apply edits right to left; ``annotate`` maps a surface to an AnnotatedToken."""
    surfaces = list(source.surfaces())
    for edit in sorted(edits, key=lambda e: e.start, reverse=True):
        if edit.end > len(surfaces):
            raise ValueError(f"edit span [{edit.start}, {edit.end}) exceeds sentence length")
        surfaces[edit.start : edit.end] = list(edit.replacement)
    return Sentence(tuple(annotate(s) for s in surfaces))


def tagset_from_edits(edits: Iterable[Edit]) -> TagSet:
    """Distinct tags appearing in ``edits``; order-insensitive."""
    tags = []
    for edit in edits:
        if edit.tag is None:
            raise ValueError("edit is untagged")
        tags.append(edit.tag)
    return TagSet(tags)


def filter_noop(pairs: Iterable[ParallelPair]) -> list[ParallelPair]:
    """Drop pairs whose edit list is empty, preserving input order."""
    return [p for p in pairs if not p.is_noop()]


@dataclass(frozen=True)
class TaggedDataset:
    """(sentence, tag set) items plus per-tag occurrence counts.

    ``label_counts`` maps tag -> number of items whose tag set contains it;
    it is recomputed at construction so it always equals a fresh recount.
    """

    items: tuple[tuple[Sentence, TagSet], ...]
    label_counts: dict[ErrorTag, int] = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "items", tuple(self.items))
        counts: dict[ErrorTag, int] = {}
        for _, tags in self.items:
            for tag in tags:
                counts[tag] = counts.get(tag, 0) + 1
        object.__setattr__(self, "label_counts", counts)

    def __len__(self) -> int:
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def count(self, tag: ErrorTag) -> int:
        return self.label_counts.get(tag, 0)


# ---------------------------------------------------------------------------
# Serialization: parallel TSV and JSON-lines pair records.
# ---------------------------------------------------------------------------


def read_parallel_tsv(lines: Iterable[str]) -> Iterator[tuple[str, str]]:
    """Yield (incorrect, correct) raw text pairs from `incorrect<TAB>correct` lines."""
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ParseError(
                f"expected 2 tab-separated fields, found {len(parts)}", line=lineno
            )
        yield parts[0], parts[1]


def pair_record_to_json(
    src: str,
    tgt: str,
    tags: Sequence[str],
    realized: Sequence[str] | None = None,
    edits: Sequence[Edit] | None = None,
) -> str:
    """Serialize one JSON-lines pair record.

    ``src`` is the incorrect side, ``tgt`` the correct side; edit spans index
    the tokens of ``src`` and replacements come from ``tgt``.
    """
    record: dict = {"src": src, "tgt": tgt, "tags": list(tags)}
    if realized is not None:
        record["realized"] = list(realized)
    if edits is not None:
        record["edits"] = [
            {
                "start": e.start,
                "end": e.end,
                "replacement": list(e.replacement),
                "tag": e.tag.name if e.tag else None,
            }
            for e in edits
        ]
    return json.dumps(record, ensure_ascii=False)


def parse_pair_record(
    line: str, lineno: int | None = None, inventory: TagInventory = DEFAULT_INVENTORY
) -> dict:
    """Parse one JSON-lines pair record into a plain dict.

    Returns keys: src (str | None), tgt (str), tags (TagSet),
    realized (TagSet | None), edits (list[Edit] | None).
    """
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=lineno, offset=exc.pos) from None
    if not isinstance(raw, dict) or "tgt" not in raw:
        raise ParseError("pair record must be an object with a 'tgt' field", line=lineno)
    try:
        tags = TagSet.from_names(raw.get("tags", []), inventory)
        realized = (
            TagSet.from_names(raw["realized"], inventory) if "realized" in raw else None
        )
    except KeyError as exc:
        raise ParseError(str(exc.args[0]), line=lineno) from None
    edits = None
    if "edits" in raw:
        edits = [
            Edit(
                e["start"],
                e["end"],
                tuple(e["replacement"]),
                inventory.by_name(e["tag"]) if e.get("tag") else None,
            )
            for e in raw["edits"]
        ]
    return {
        "src": raw.get("src"),
        "tgt": raw["tgt"],
        "tags": tags,
        "realized": realized,
        "edits": edits,
    }
