"""End-to-end orchestration: corpus ingestion, training-data construction,
generation, and statistics.

Generation is streaming (bounded memory) and reproducible: every sentence
gets its own derived seed (base seed XOR input index), so output does not
depend on the worker count, and per-sentence failures are skipped and counted
rather than aborting the run — unless they exceed 10% of the input, which
points at a systemic problem and raises.
"""

from __future__ import annotations

import json
import multiprocessing
from collections.abc import Iterable, Iterator
from dataclasses import asdict, dataclass, field

from .classifier import RuleTable, annotate_pair
from .core import (
    DEFAULT_INVENTORY,
    Edit,
    ParallelPair,
    Sentence,
    TagInventory,
    TagSet,
    TaggedDataset,
    filter_noop,
    pair_record_to_json,
    parse_pair_record,
    read_parallel_tsv,
    tagset_from_edits,
)
from .corruptor import EditInventory, ExternalBackend, corrupt, encode_prefix
from .errors import BackendError, DataError, EmptyInputError, ParseError
from .tagger import TaggerModel, predict
from .tokenizer import Annotator, default_annotator

FAILURE_CEILING = 0.10


@dataclass
class PipelineConfig:
    """Run settings; round-trips through a JSON file."""

    input: str | None = None
    output: str | None = None
    lexicon: str | None = None
    model: str | None = None
    inventory: str | None = None
    seed: int = 0
    top_k: int = 50
    threshold: float | None = None
    growth_budget: float = 0.10
    workers: int = 1
    backend: str = "reference"
    backend_command: list[str] | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "PipelineConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid config JSON: {exc.msg}", offset=exc.pos) from None
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise DataError(f"unknown config fields: {', '.join(sorted(unknown))}")
        return cls(**raw)

    @classmethod
    def load(cls, path: str) -> "PipelineConfig":
        with open(path, encoding="utf-8") as handle:
            return cls.from_json(handle.read())

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            handle.write(self.to_json())


# ---------------------------------------------------------------------------
# Corpus ingestion.
# ---------------------------------------------------------------------------


def iter_raw_pairs(path: str) -> Iterator[tuple[str, str]]:
    """(incorrect, correct) text pairs from a TSV or JSON-lines file."""
    with open(path, encoding="utf-8") as handle:
        first = handle.readline()
        handle.seek(0)
        if first.lstrip().startswith("{"):
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                record = parse_pair_record(line, lineno)
                if record["src"] is None:
                    raise ParseError("pair record is missing 'src'", line=lineno)
                yield record["src"], record["tgt"]
        else:
            yield from read_parallel_tsv(handle)


def load_tagged_records(
    path: str, inventory: TagInventory = DEFAULT_INVENTORY
) -> Iterator[dict]:
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if line.strip():
                yield parse_pair_record(line, lineno, inventory)


def load_tagged_dataset(
    path: str,
    annotator: Annotator | None = None,
    inventory: TagInventory = DEFAULT_INVENTORY,
) -> TaggedDataset:
    """Read (sentence, tag set) items from tagged JSON-lines records."""
    annotator = annotator or default_annotator()
    items = []
    for record in load_tagged_records(path, inventory):
        items.append((annotator.tokenize(record["tgt"]), record["tags"]))
    return TaggedDataset(tuple(items))


def write_tagged_dataset(dataset: TaggedDataset, path: str) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        for sentence, tags in dataset:
            handle.write(json.dumps({"tgt": sentence.text(), "tags": list(tags.names())}))
            handle.write("\n")


# ---------------------------------------------------------------------------
# Training-data construction.
# ---------------------------------------------------------------------------


@dataclass
class BuildReport:
    pairs_read: int = 0
    noop_pairs: int = 0

    @property
    def items(self) -> int:
        return self.pairs_read - self.noop_pairs

    def as_dict(self) -> dict:
        return {
            "pairs_read": self.pairs_read,
            "noop_pairs": self.noop_pairs,
            "items": self.items,
        }


def build_training_data(
    pairs: Iterable[tuple[str, str]],
    table: RuleTable | None = None,
    annotator: Annotator | None = None,
) -> tuple[TaggedDataset, BuildReport, list[ParallelPair]]:
    """Annotate pairs, drop noops, and emit (correct sentence, tag set) items.

    Also returns the annotated non-noop pairs so callers can mine an edit
    inventory from the same pass.
    """
    annotator = annotator or default_annotator()
    report = BuildReport()
    annotated: list[ParallelPair] = []
    for src_text, tgt_text in pairs:
        report.pairs_read += 1
        pair = ParallelPair(annotator.tokenize(src_text), annotator.tokenize(tgt_text))
        annotated.append(annotate_pair(pair, table))
    kept = filter_noop(annotated)
    report.noop_pairs = report.pairs_read - len(kept)
    items = tuple((p.target, tagset_from_edits(p.edits)) for p in kept)
    return TaggedDataset(items), report, kept


# ---------------------------------------------------------------------------
# Generation.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GenerationRecord:
    source: Sentence  # correct input sentence
    corrupted: Sentence
    requested: TagSet
    realized: TagSet
    edits: tuple[Edit, ...]
    prefix: str

    def to_json(self) -> str:
        return pair_record_to_json(
            src=self.corrupted.text(),
            tgt=self.source.text(),
            tags=self.requested.names(),
            realized=self.realized.names(),
            edits=self.edits,
        )


@dataclass
class GenerationSummary:
    total: int = 0
    emitted: int = 0
    skipped: int = 0
    failed: int = 0
    requested_nonempty: int = 0
    realized_nonempty: int = 0
    identity_outputs: int = 0
    requested_per_tag: dict[str, int] = field(default_factory=dict)
    realized_per_tag: dict[str, int] = field(default_factory=dict)

    def record(self, rec: GenerationRecord) -> None:
        self.emitted += 1
        if rec.requested:
            self.requested_nonempty += 1
            if rec.realized:
                self.realized_nonempty += 1
        if rec.corrupted.surfaces() == rec.source.surfaces():
            self.identity_outputs += 1
        for tag in rec.requested:
            self.requested_per_tag[tag.name] = self.requested_per_tag.get(tag.name, 0) + 1
        for tag in rec.realized:
            self.realized_per_tag[tag.name] = self.realized_per_tag.get(tag.name, 0) + 1

    def as_dict(self) -> dict:
        rate = (
            self.realized_nonempty / self.requested_nonempty
            if self.requested_nonempty
            else 0.0
        )
        return {
            "total": self.total,
            "emitted": self.emitted,
            "skipped": self.skipped,
            "failed": self.failed,
            "requested_nonempty": self.requested_nonempty,
            "realized_nonempty": self.realized_nonempty,
            "realized_rate": round(rate, 4),
            "identity_output_rate": round(
                self.identity_outputs / self.emitted if self.emitted else 0.0, 4
            ),
            "requested_per_tag": dict(sorted(self.requested_per_tag.items())),
            "realized_per_tag": dict(sorted(self.realized_per_tag.items())),
        }


def derive_seed(base_seed: int, index: int) -> int:
    return base_seed ^ index


def _generate_one(
    index: int,
    line: str,
    model: TaggerModel,
    inventory: EditInventory,
    annotator: Annotator,
    top_k: int,
    base_seed: int,
) -> GenerationRecord | None:
    if not line.strip():
        return None
    sentence = annotator.tokenize(line)
    requested = predict(model, sentence)
    prefix = encode_prefix(requested, sentence, model.inventory)
    result = corrupt(
        sentence,
        requested,
        inventory,
        top_k=top_k,
        seed=derive_seed(base_seed, index),
        annotator=annotator,
    )
    return GenerationRecord(
        source=sentence,
        corrupted=result.output,
        requested=requested,
        realized=result.realized,
        edits=result.applied_edits,
        prefix=prefix,
    )


# Worker processes inherit this via fork; see _pool_task.
_WORKER_CONTEXT: dict = {}


def _pool_task(payload: tuple[int, str]):
    index, line = payload
    ctx = _WORKER_CONTEXT
    return _run_one(
        index, line, ctx["model"], ctx["inventory"], ctx["annotator"],
        ctx["top_k"], ctx["seed"],
    )


def _run_one(index, line, model, inventory, annotator, top_k, seed):
    try:
        record = _generate_one(index, line, model, inventory, annotator, top_k, seed)
        return ("ok", record) if record is not None else ("skip", None)
    except EmptyInputError:
        return ("skip", None)
    except Exception as exc:  # noqa: BLE001 - skip-and-count policy
        return ("fail", str(exc))


def generate(
    lines: Iterable[str],
    model: TaggerModel,
    inventory: EditInventory,
    *,
    top_k: int = 50,
    seed: int = 0,
    workers: int = 1,
    threshold: float | None = None,
    annotator: Annotator | None = None,
    summary: GenerationSummary | None = None,
) -> Iterator[GenerationRecord]:
    """Tokenize, tag, and corrupt a stream of correct sentences.

    Yields records in input order regardless of ``workers``. Pass a
    GenerationSummary to collect run counts; it is complete once the
    iterator is exhausted.
    """
    annotator = annotator or default_annotator()
    if threshold is not None:
        model = model.with_threshold(threshold)
    if summary is None:
        summary = GenerationSummary()

    def finish():
        if summary.total and summary.failed / summary.total > FAILURE_CEILING:
            raise BackendError(
                f"{summary.failed}/{summary.total} sentences failed "
                f"(> {FAILURE_CEILING:.0%} ceiling)"
            )

    if workers <= 1:
        for index, line in enumerate(lines):
            summary.total += 1
            status, value = _run_one(
                index, line, model, inventory, annotator, top_k, seed
            )
            if status == "ok":
                summary.record(value)
                yield value
            elif status == "skip":
                summary.skipped += 1
            else:
                summary.skipped += 1
                summary.failed += 1
        finish()
        return

    _WORKER_CONTEXT.update(
        model=model, inventory=inventory, annotator=annotator, top_k=top_k, seed=seed
    )
    try:
        ctx = multiprocessing.get_context("fork")
        with ctx.Pool(processes=workers) as pool:
            for status, value in pool.imap(
                _pool_task, enumerate(lines), chunksize=16
            ):
                summary.total += 1
                if status == "ok":
                    summary.record(value)
                    yield value
                elif status == "skip":
                    summary.skipped += 1
                else:
                    summary.skipped += 1
                    summary.failed += 1
    finally:
        _WORKER_CONTEXT.clear()
    finish()


def generate_with_backend(
    lines: Iterable[str],
    model: TaggerModel,
    backend: ExternalBackend,
    *,
    threshold: float | None = None,
    annotator: Annotator | None = None,
    table: RuleTable | None = None,
    summary: GenerationSummary | None = None,
) -> Iterator[GenerationRecord]:
    """Generation through an external line-oriented corruption backend.

    The backend only returns text, so realized tags and edits are recovered
    by re-annotating its output against the input; runs single-worker.
    """
    annotator = annotator or default_annotator()
    if threshold is not None:
        model = model.with_threshold(threshold)
    if summary is None:
        summary = GenerationSummary()
    for line in lines:
        summary.total += 1
        if not line.strip():
            summary.skipped += 1
            continue
        try:
            sentence = annotator.tokenize(line)
            requested = predict(model, sentence)
            prefix = encode_prefix(requested, sentence, model.inventory)
            response = backend.corrupt_line(prefix)
            corrupted = annotator.retokenize(response.split(" ")) if response.strip() else sentence
            if corrupted.surfaces() == sentence.surfaces():
                realized, edits = TagSet(), ()
            else:
                annotated = annotate_pair(ParallelPair(corrupted, sentence), table)
                edits = annotated.edits
                realized = tagset_from_edits(edits)
        except BackendError:
            raise
        except Exception:  # noqa: BLE001 - skip-and-count policy
            summary.skipped += 1
            summary.failed += 1
            continue
        record = GenerationRecord(sentence, corrupted, requested, realized, edits, prefix)
        summary.record(record)
        yield record
    if summary.total and summary.failed / summary.total > FAILURE_CEILING:
        raise BackendError(
            f"{summary.failed}/{summary.total} sentences failed "
            f"(> {FAILURE_CEILING:.0%} ceiling)"
        )


def write_records(records: Iterable[GenerationRecord], path: str) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(record.to_json())
            handle.write("\n")
            count += 1
    return count


# ---------------------------------------------------------------------------
# Statistics.
# ---------------------------------------------------------------------------


@dataclass
class StatsReport:
    total: int
    counts: dict[str, int]
    fractions: dict[str, float]
    irlbl: dict[str, float]
    mean_ir: float
    requested_nonempty: int = 0
    realized_nonempty: int = 0
    realized_counts: dict[str, int] = field(default_factory=dict)
    has_realized: bool = False

    @property
    def realized_rate(self) -> float:
        return (
            self.realized_nonempty / self.requested_nonempty
            if self.requested_nonempty
            else 0.0
        )

    def as_dict(self) -> dict:
        out = {
            "total": self.total,
            "mean_ir": round(self.mean_ir, 4),
            "counts": dict(sorted(self.counts.items())),
            "fractions": {k: round(v, 4) for k, v in sorted(self.fractions.items())},
            "irlbl": {k: round(v, 4) for k, v in sorted(self.irlbl.items())},
        }
        if self.has_realized:
            out["requested_nonempty"] = self.requested_nonempty
            out["realized_nonempty"] = self.realized_nonempty
            out["realized_rate"] = round(self.realized_rate, 4)
            out["realized_counts"] = dict(sorted(self.realized_counts.items()))
        return out

    def text_table(self) -> str:
        headers = ["tag", "count", "fraction", "irlbl"]
        if self.has_realized:
            headers += ["realized", "rate"]
        rows = []
        for name in sorted(self.counts):
            count = self.counts[name]
            row = [
                name,
                str(count),
                f"{self.fractions.get(name, 0.0):.4f}",
                f"{self.irlbl[name]:.2f}" if name in self.irlbl else "-",
            ]
            if self.has_realized:
                realized = self.realized_counts.get(name, 0)
                rate = realized / count if count else 0.0
                row += [str(realized), f"{rate:.2f}"]
            rows.append(row)
        widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
                  for i, h in enumerate(headers)]
        lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths))]
        for row in rows:
            lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)))
        lines.append("")
        lines.append(f"items: {self.total}   MeanIR: {self.mean_ir:.4f}")
        if self.has_realized:
            lines.append(
                f"requested non-empty: {self.requested_nonempty}   "
                f"realized non-empty: {self.realized_nonempty}   "
                f"rate: {self.realized_rate:.4f}"
            )
        return "\n".join(lines)


def stats_from_records(records: Iterable[dict]) -> StatsReport:
    """Distribution report over tagged or generation records.

    For generation records (with a ``realized`` field) also reports how often
    a non-empty requested tag set led to a non-empty realized set.
    """
    total = 0
    counts: dict[str, int] = {}
    realized_counts: dict[str, int] = {}
    requested_nonempty = 0
    realized_nonempty = 0
    has_realized = False
    for record in records:
        total += 1
        tags = record["tags"]
        for tag in tags:
            counts[tag.name] = counts.get(tag.name, 0) + 1
        realized = record.get("realized")
        if realized is not None:
            has_realized = True
            if tags:
                requested_nonempty += 1
                if realized:
                    realized_nonempty += 1
            for tag in realized:
                realized_counts[tag.name] = realized_counts.get(tag.name, 0) + 1
    if total == 0:
        raise EmptyInputError("no records to report on")
    fractions = {name: c / total for name, c in counts.items()}
    positive = {name: c for name, c in counts.items() if c > 0}
    if positive:
        top = max(positive.values())
        irlbl = {name: top / c for name, c in positive.items()}
        mean_ir = sum(irlbl.values()) / len(irlbl)
    else:
        irlbl, mean_ir = {}, 1.0
    return StatsReport(
        total=total,
        counts=counts,
        fractions=fractions,
        irlbl=irlbl,
        mean_ir=mean_ir,
        requested_nonempty=requested_nonempty,
        realized_nonempty=realized_nonempty,
        realized_counts=realized_counts,
        has_realized=has_realized,
    )


def stats_from_dataset(dataset: TaggedDataset) -> StatsReport:
    if len(dataset) == 0:
        raise EmptyInputError("no records to report on")
    return stats_from_records({"tags": tags} for _, tags in dataset)
