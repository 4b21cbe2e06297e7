"""Tag-conditioned corruption.

Three pieces live here: the ``grammar_error: (...)`` prefix codec that is the
wire contract with any corruption backend, the pattern inventory mined from
annotated parallel data (the reference backend), and the seeded top-k
corruption step itself. The inventory generalizes morphological edits
(pluralization, agreement, tense) through the shared inflection tables and
keeps everything else as exact surface patterns, so every introduced error is
auditable by the annotator.
"""

from __future__ import annotations

import json
import random
import subprocess
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from . import morph
from .classifier import RuleTable, annotate_pair, default_rule_table
from .core import (
    DEFAULT_INVENTORY,
    Edit,
    ErrorTag,
    ParallelPair,
    Sentence,
    TagInventory,
    TagSet,
    tagset_from_edits,
)
from .errors import BackendError, DataError, EmptyInventoryError, ParseError
from .tokenizer import Annotator, default_annotator

PREFIX_TASK = "grammar_error: ("
INVENTORY_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# Prefix codec.
# ---------------------------------------------------------------------------


def encode_prefix(
    tags: TagSet, sentence: Sentence, inventory: TagInventory = DEFAULT_INVENTORY
) -> str:
    """`grammar_error: (` + one a/b per inventory tag + `) ` + sentence."""
    bits = "".join("b" if m else "a" for m in tags.membership(inventory))
    return f"{PREFIX_TASK}{bits}) {sentence.text()}"


def decode_prefix(
    line: str,
    annotator: Annotator | None = None,
    inventory: TagInventory = DEFAULT_INVENTORY,
) -> tuple[TagSet, Sentence]:
    """Inverse of encode_prefix; malformed input raises ParseError with the
    byte offset of the first offending character."""
    annotator = annotator or default_annotator()
    if not line.startswith(PREFIX_TASK):
        for i, (got, want) in enumerate(zip(line, PREFIX_TASK)):
            if got != want:
                raise ParseError(f"expected {want!r} in task prefix, got {got!r}", offset=i)
        raise ParseError("truncated task prefix", offset=len(line))
    body = line[len(PREFIX_TASK) :]
    close = body.find(")")
    if close == -1:
        raise ParseError("unterminated tag string", offset=len(line))
    bits = body[:close]
    if len(bits) != len(inventory):
        raise ParseError(
            f"tag string has {len(bits)} characters, expected {len(inventory)}",
            offset=len(PREFIX_TASK) + min(close, len(inventory)),
        )
    for i, c in enumerate(bits):
        if c not in "ab":
            raise ParseError(
                f"tag string may contain only 'a'/'b', got {c!r}",
                offset=len(PREFIX_TASK) + i,
            )
    rest = body[close + 1 :]
    if not rest.startswith(" ") or not rest[1:]:
        raise ParseError("expected a space and a sentence after the tag string",
                         offset=len(PREFIX_TASK) + close + 1)
    tags = TagSet(inventory[i] for i, c in enumerate(bits) if c == "b")
    sentence = annotator.retokenize(rest[1:].split(" "))
    return tags, sentence


# ---------------------------------------------------------------------------
# Morphological transforms shared by mining and application.
# ---------------------------------------------------------------------------


def _noun_transform(direction: str):
    def apply(tok):
        if tok.pos != "NOUN":
            return None
        number = morph.noun_number(tok.surface, tok.lemma)
        if direction == "sing->plur" and number == "sing":
            return morph.pluralize_noun(tok.lemma)
        if direction == "plur->sing" and number == "plur":
            return tok.lemma
        return None

    return apply


_VERB_INFLECT = {
    morph.BASE: lambda lemma: lemma,
    morph.THIRD_SG: morph.verb_3sg,
    morph.PAST: morph.verb_past,
    morph.PAST_PART: morph.verb_past_participle,
    morph.GERUND: morph.verb_gerund,
}


def _verb_transform(src_form: str, dst_form: str):
    def apply(tok):
        if tok.pos != "VERB":
            return None
        if src_form not in morph.verb_forms(tok.surface, tok.lemma):
            return None
        return _VERB_INFLECT[dst_form](tok.lemma)

    return apply


def _adj_form(tok) -> str | None:
    w = tok.surface.lower()
    if w == tok.lemma:
        return "base"
    if w == morph.comparative(tok.lemma):
        return "comp"
    if w == morph.superlative(tok.lemma):
        return "sup"
    return None


def _adj_transform(src_form: str, dst_form: str):
    inflect = {
        "base": lambda lemma: lemma,
        "comp": morph.comparative,
        "sup": morph.superlative,
    }

    def apply(tok):
        if tok.pos != "ADJ" or _adj_form(tok) != src_form:
            return None
        return inflect[dst_form](tok.lemma)

    return apply


def _build_transforms() -> dict:
    transforms: dict = {}
    transforms["noun:sing->plur"] = _noun_transform("sing->plur")
    transforms["noun:plur->sing"] = _noun_transform("plur->sing")
    forms = (morph.BASE, morph.THIRD_SG, morph.PAST, morph.PAST_PART, morph.GERUND)
    for src in forms:
        for dst in forms:
            if src != dst:
                transforms[f"verb:{src}->{dst}"] = _verb_transform(src, dst)
    for src in ("base", "comp", "sup"):
        for dst in ("base", "comp", "sup"):
            if src != dst:
                transforms[f"adj:{src}->{dst}"] = _adj_transform(src, dst)
    return transforms


TRANSFORMS = _build_transforms()


def _match_case(template: str, produced: str) -> str:
    if template[:1].isupper():
        return produced[:1].upper() + produced[1:]
    return produced


def apply_transform(name: str, token) -> str | None:
    """Apply a named transform to an annotated token; None when inapplicable
    or when the result would not change the surface."""
    produced = TRANSFORMS[name](token)
    if produced is None:
        return None
    produced = _match_case(token.surface, produced)
    return produced if produced != token.surface else None


# ---------------------------------------------------------------------------
# Patterns and the inventory.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Pattern:
    """One corruption pattern; ``key`` identifies it for count aggregation."""

    kind: str  # morph | surface | insert | delete | swap
    transform: str | None = None
    find: tuple[str, ...] = ()
    replace: tuple[str, ...] = ()
    tokens: tuple[str, ...] = ()
    left_pos: str | None = None
    right_pos: str | None = None
    pos_signature: tuple[str, ...] = ()
    perm: tuple[int, ...] = ()

    def key(self) -> tuple:
        return (
            self.kind,
            self.transform,
            self.find,
            self.replace,
            self.tokens,
            self.left_pos,
            self.right_pos,
            self.pos_signature,
            self.perm,
        )

    def to_json(self) -> dict:
        out = {"kind": self.kind}
        for name in (
            "transform",
            "find",
            "replace",
            "tokens",
            "left_pos",
            "right_pos",
            "pos_signature",
            "perm",
        ):
            value = getattr(self, name)
            if value not in (None, ()):
                out[name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_json(cls, raw: dict) -> "Pattern":
        def tup(name):
            return tuple(raw.get(name, ()))

        return cls(
            kind=raw["kind"],
            transform=raw.get("transform"),
            find=tup("find"),
            replace=tup("replace"),
            tokens=tup("tokens"),
            left_pos=raw.get("left_pos"),
            right_pos=raw.get("right_pos"),
            pos_signature=tup("pos_signature"),
            perm=tup("perm"),
        )


class EditInventory:
    """Per-tag weighted corruption patterns; weights are corpus counts."""

    def __init__(self, inventory: TagInventory = DEFAULT_INVENTORY):
        self.inventory = inventory
        self._patterns: dict[str, list[Pattern]] = {}
        self._weights: dict[str, dict[tuple, int]] = {}

    def add(self, tag: ErrorTag, pattern: Pattern, weight: int = 1) -> None:
        if weight < 1:
            raise ValueError("pattern weights must be >= 1")
        slot = self._patterns.setdefault(tag.name, [])
        weights = self._weights.setdefault(tag.name, {})
        if pattern.key() not in weights:
            slot.append(pattern)
            weights[pattern.key()] = 0
        weights[pattern.key()] += weight

    def for_tag(self, tag: ErrorTag) -> list[tuple[Pattern, int]]:
        """Patterns with weights, in first-mined order."""
        patterns = self._patterns.get(tag.name, [])
        weights = self._weights.get(tag.name, {})
        return [(p, weights[p.key()]) for p in patterns]

    def tags(self) -> list[str]:
        return sorted(self._patterns)

    def __len__(self) -> int:
        return sum(len(v) for v in self._patterns.values())

    def weight_total(self) -> int:
        return sum(sum(w.values()) for w in self._weights.values())

    def to_json(self) -> dict:
        return {
            "format_version": INVENTORY_FORMAT_VERSION,
            "tags": list(self.inventory.names()),
            "patterns": {
                tag: [
                    dict(p.to_json(), weight=self._weights[tag][p.key()])
                    for p in patterns
                ]
                for tag, patterns in sorted(self._patterns.items())
            },
        }

    @classmethod
    def from_json(cls, raw: dict, inventory: TagInventory = DEFAULT_INVENTORY) -> "EditInventory":
        if raw.get("format_version") != INVENTORY_FORMAT_VERSION:
            raise DataError(
                f"unsupported inventory format version {raw.get('format_version')}"
            )
        if tuple(raw.get("tags", ())) != inventory.names():
            raise DataError("inventory tag list does not match the configured inventory")
        out = cls(inventory)
        for tag_name, patterns in raw.get("patterns", {}).items():
            tag = inventory.by_name(tag_name)
            for entry in patterns:
                out.add(tag, Pattern.from_json(entry), weight=int(entry["weight"]))
        return out

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            json.dump(self.to_json(), handle, ensure_ascii=False, indent=2)
            handle.write("\n")

    @classmethod
    def load(cls, path: str, inventory: TagInventory = DEFAULT_INVENTORY) -> "EditInventory":
        try:
            with open(path, encoding="utf-8") as handle:
                raw = json.load(handle)
        except (OSError, json.JSONDecodeError) as exc:
            raise DataError(f"unreadable inventory file {path}: {exc}") from None
        return cls.from_json(raw, inventory)


# ---------------------------------------------------------------------------
# Mining.
# ---------------------------------------------------------------------------


@dataclass
class MiningReport:
    pairs: int = 0
    edits_seen: int = 0
    mined: int = 0
    dropped: int = 0
    per_tag: dict[str, int] = field(default_factory=dict)
    dropped_per_tag: dict[str, int] = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "pairs": self.pairs,
            "edits_seen": self.edits_seen,
            "mined": self.mined,
            "dropped": self.dropped,
            "per_tag": dict(sorted(self.per_tag.items())),
            "dropped_per_tag": dict(sorted(self.dropped_per_tag.items())),
        }


def _find_permutation(correct: Sequence[str], incorrect: Sequence[str]) -> tuple[int, ...] | None:
    used = [False] * len(correct)
    perm = []
    for surface in incorrect:
        for i, c in enumerate(correct):
            if not used[i] and c == surface:
                used[i] = True
                perm.append(i)
                break
        else:
            return None
    return tuple(perm)


def _pattern_from_edit(
    edit: Edit, tgt_start: int, source: Sentence, target: Sentence
) -> Pattern | None:
    incorrect = list(source.surfaces()[edit.start : edit.end])
    correct_tokens = target.tokens[tgt_start : tgt_start + len(edit.replacement)]
    correct = [t.surface for t in correct_tokens]

    if edit.tag is not None and edit.tag.name == "WO":
        if len(correct) >= 2 and len(correct) == len(incorrect):
            perm = _find_permutation(correct, incorrect)
            if perm is not None:
                return Pattern(
                    "swap",
                    pos_signature=tuple(t.pos for t in correct_tokens),
                    perm=perm,
                )
        return None
    if not incorrect:  # correction inserted tokens; corruption deletes them
        return Pattern("delete", find=tuple(correct))
    if not correct:  # correction deleted tokens; corruption inserts them
        left = target.tokens[tgt_start - 1].pos if tgt_start > 0 else None
        right = target.tokens[tgt_start].pos if tgt_start < len(target) else None
        return Pattern("insert", tokens=tuple(incorrect), left_pos=left, right_pos=right)
    if len(correct) == 1 and len(incorrect) == 1:
        tok = correct_tokens[0]
        for name in TRANSFORMS:
            if apply_transform(name, tok) == incorrect[0]:
                return Pattern("morph", transform=name)
    return Pattern("surface", find=tuple(correct), replace=tuple(incorrect))


def _target_spans(edits: Sequence[Edit]) -> list[int]:
    """Start offsets of each edit's replacement within the target sentence."""
    starts = []
    delta = 0
    for edit in sorted(edits, key=lambda e: e.start):
        starts.append(edit.start + delta)
        delta += len(edit.replacement) - (edit.end - edit.start)
    return starts


def _splice(surfaces: Sequence[str], start: int, length: int, new: Sequence[str]) -> list[str]:
    out = list(surfaces)
    out[start : start + length] = list(new)
    return out


def mine_inventory(
    pairs: Iterable[ParallelPair],
    table: RuleTable | None = None,
    inventory: TagInventory = DEFAULT_INVENTORY,
) -> tuple[EditInventory, MiningReport]:
    """Build per-tag pattern tables from annotated pairs.

    Every typed edit proposes one pattern; the pattern is kept only if,
    applied back to its own source context, the annotator classifies the
    synthesized edit to the same tag (violators are dropped and counted).
    """
    table = table or default_rule_table()
    out = EditInventory(inventory)
    report = MiningReport()
    for pair in pairs:
        if pair.edits is None:
            raise DataError("mine_inventory needs pairs with computed edits")
        report.pairs += 1
        starts = _target_spans(pair.edits)
        for edit, tgt_start in zip(sorted(pair.edits, key=lambda e: e.start), starts):
            report.edits_seen += 1
            if edit.tag is None:
                raise DataError("mine_inventory needs typed edits")
            pattern = _pattern_from_edit(edit, tgt_start, pair.source, pair.target)
            if pattern is not None and _self_check(
                pattern, edit, tgt_start, pair.source, pair.target, table
            ):
                out.add(edit.tag, pattern)
                report.mined += 1
                report.per_tag[edit.tag.name] = report.per_tag.get(edit.tag.name, 0) + 1
            else:
                report.dropped += 1
                report.dropped_per_tag[edit.tag.name] = (
                    report.dropped_per_tag.get(edit.tag.name, 0) + 1
                )
    if report.mined == 0:
        raise EmptyInventoryError("no usable corruption patterns were mined")
    return out, report


def _self_check(
    pattern: Pattern,
    edit: Edit,
    tgt_start: int,
    source: Sentence,
    target: Sentence,
    table: RuleTable,
) -> bool:
    incorrect = source.surfaces()[edit.start : edit.end]
    corrupted = _splice(target.surfaces(), tgt_start, len(edit.replacement), incorrect)
    if corrupted == list(target.surfaces()) or not corrupted:
        return False
    synthesized = table.annotator.retokenize(corrupted)
    annotated = annotate_pair(ParallelPair(synthesized, target), table)
    return tagset_from_edits(annotated.edits) == TagSet([edit.tag])


# ---------------------------------------------------------------------------
# Corruption.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CorruptionResult:
    """Outcome of one corruption call.

    ``applied_edits`` are oriented like core edits for the (output, original)
    pair: spans index the corrupted output and replacements restore the
    original tokens, so re-annotating the result is directly comparable.
    """

    output: Sentence
    requested: TagSet
    realized: TagSet
    applied_edits: tuple[Edit, ...]


@dataclass(frozen=True)
class _Candidate:
    start: int
    end: int
    new: tuple[str, ...]
    weight: int
    pattern_index: int


def _overlaps(start: int, end: int, protected: list[tuple[int, int]]) -> bool:
    """Zero-length spans (insertion points, deletion marks) may not even touch
    another edit's boundary; otherwise the edits could not be replayed in an
    unambiguous order."""
    for ps, pe in protected:
        if start == end or ps == pe:
            if ps <= start <= pe or start <= ps <= end:
                return True
        elif start < pe and ps < end:
            return True
    return False


def _sites(pattern: Pattern, sentence: Sentence, annotator: Annotator):
    """Yield (start, end, new_tokens) applications of a pattern."""
    surfaces = sentence.surfaces()
    n = len(surfaces)
    if pattern.kind == "morph":
        for i, tok in enumerate(sentence.tokens):
            if not annotator.is_word(tok.surface):
                continue
            produced = apply_transform(pattern.transform, tok)
            if produced is not None:
                yield i, i + 1, (produced,)
    elif pattern.kind == "surface":
        k = len(pattern.find)
        for i in range(n - k + 1):
            if surfaces[i : i + k] == pattern.find:
                yield i, i + k, pattern.replace
    elif pattern.kind == "delete":
        k = len(pattern.find)
        for i in range(n - k + 1):
            if surfaces[i : i + k] == pattern.find:
                yield i, i + k, ()
    elif pattern.kind == "insert":
        for i in range(n + 1):
            left = sentence.tokens[i - 1].pos if i > 0 else None
            right = sentence.tokens[i].pos if i < n else None
            if left == pattern.left_pos and right == pattern.right_pos:
                yield i, i, pattern.tokens
    elif pattern.kind == "swap":
        k = len(pattern.pos_signature)
        for i in range(n - k + 1):
            block = sentence.tokens[i : i + k]
            if tuple(t.pos for t in block) != pattern.pos_signature:
                continue
            new = tuple(surfaces[i + p] for p in pattern.perm)
            if new != tuple(surfaces[i : i + k]):
                yield i, i + k, new
    else:  # pragma: no cover - guarded by Pattern construction
        raise ValueError(f"unknown pattern kind {pattern.kind!r}")


def corrupt(
    sentence: Sentence,
    tags: TagSet,
    inventory: EditInventory,
    top_k: int = 50,
    seed: int = 0,
    annotator: Annotator | None = None,
) -> CorruptionResult:
    """Apply at most one inventory edit per requested tag.

    Tags are visited in a seed-shuffled order. For each tag, all applicable
    (site, pattern) candidates in the current sentence are ranked by weight,
    truncated to ``top_k``, and one is sampled with probability proportional
    to weight. Sites overlapping previously applied edits are excluded; a tag
    with no applicable candidate is skipped and left unrealized.
    """
    if top_k < 1:
        raise DataError("top_k must be >= 1")
    annotator = annotator or default_annotator()
    rng = random.Random(seed)
    order = sorted(tags, key=lambda t: t.index)
    rng.shuffle(order)

    current = sentence
    protected: list[tuple[int, int]] = []
    applied: list[dict] = []
    realized: list[ErrorTag] = []

    for tag in order:
        candidates: list[_Candidate] = []
        seen: set[tuple] = set()
        for pattern_index, (pattern, weight) in enumerate(inventory.for_tag(tag)):
            for start, end, new in _sites(pattern, current, annotator):
                if _overlaps(start, end, protected):
                    continue
                key = (start, end, new)
                if key in seen:
                    continue
                seen.add(key)
                candidates.append(_Candidate(start, end, new, weight, pattern_index))
        if not candidates:
            continue
        candidates.sort(key=lambda c: (-c.weight, c.pattern_index, c.start, c.end))
        pool = candidates[:top_k]
        choice = rng.choices(pool, weights=[c.weight for c in pool], k=1)[0]

        old_tokens = current.surfaces()[choice.start : choice.end]
        delta = len(choice.new) - (choice.end - choice.start)
        new_surfaces = _splice(current.surfaces(), choice.start, choice.end - choice.start, choice.new)
        current = annotator.retokenize(new_surfaces)

        shifted = []
        for ps, pe in protected:
            if ps >= choice.end:
                shifted.append((ps + delta, pe + delta))
            else:
                shifted.append((ps, pe))
        shifted.append((choice.start, choice.start + len(choice.new)))
        protected = shifted
        for record in applied:
            if record["start"] >= choice.end:
                record["start"] += delta
        applied.append(
            {
                "start": choice.start,
                "length": len(choice.new),
                "original": tuple(old_tokens),
                "tag": tag,
            }
        )
        realized.append(tag)

    edits = tuple(
        Edit(r["start"], r["start"] + r["length"], r["original"], r["tag"])
        for r in sorted(applied, key=lambda r: r["start"])
    )
    return CorruptionResult(current, tags, TagSet(realized), edits)


def verify_realized(
    result: CorruptionResult,
    original: Sentence,
    table: RuleTable | None = None,
) -> TagSet:
    """Re-annotate (output, original) and report the tags actually present."""
    if result.output.surfaces() == original.surfaces():
        return TagSet()
    annotated = annotate_pair(ParallelPair(result.output, original), table)
    return tagset_from_edits(annotated.edits)


# ---------------------------------------------------------------------------
# External backend protocol: one prefix line in, one corrupted line out.
# ---------------------------------------------------------------------------


class ExternalBackend:
    """Line-oriented corruption backend over a subprocess's stdin/stdout."""

    def __init__(self, command: Sequence[str]):
        self.command = list(command)
        self._proc: subprocess.Popen | None = None

    def __enter__(self) -> "ExternalBackend":
        self._proc = subprocess.Popen(
            self.command,
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
            bufsize=1,
        )
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=10)
            self._proc = None

    def corrupt_line(self, prefix_line: str) -> str:
        if self._proc is None or self._proc.stdin is None or self._proc.stdout is None:
            raise BackendError("backend process is not running")
        if "\n" in prefix_line:
            raise BackendError("request must be a single line")
        try:
            self._proc.stdin.write(prefix_line + "\n")
            self._proc.stdin.flush()
            response = self._proc.stdout.readline()
        except (BrokenPipeError, OSError) as exc:
            raise BackendError(f"backend I/O failed: {exc}") from None
        if response == "":
            raise BackendError("backend closed its output stream")
        return response.rstrip("\n")
