"""Trainable multi-label error tagger.

Predicts, for a correct sentence, which error types a plausible corruption
would contain. The reference model is a bank of independent logistic scorers
over hashed sparse features, one per tag, trained with per-label binary
cross-entropy; anything exposing per-tag scores in [0, 1] plus a global
threshold can stand in for it behind the pipeline's backend protocol.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field, replace

import numpy as np

from . import morph
from .core import DEFAULT_INVENTORY, ErrorTag, Sentence, TagInventory, TagSet, TaggedDataset
from .errors import DataError, EmptyInputError, TuningError
from .metrics import f_beta

MODEL_FORMAT_VERSION = 1

_LENGTH_BUCKETS = ((5, "short"), (10, "medium"), (20, "long"))


def _hash(feature: str, space: int) -> int:
    digest = hashlib.blake2b(feature.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big") % space


@dataclass(frozen=True)
class FeatureExtractor:
    """Deterministic sparse feature extraction into a fixed hash space."""

    hash_space: int = 2**18

    def extract(self, sentence: Sentence) -> np.ndarray:
        feats = set()
        tokens = sentence.tokens
        words = [t.surface.lower() for t in tokens]
        poses = [t.pos for t in tokens]
        for w in words:
            feats.add("w=" + w)
        for i in range(len(words) - 1):
            feats.add(f"wb={words[i]}_{words[i + 1]}")
        for p in poses:
            feats.add("p=" + p)
        for i in range(len(poses) - 1):
            feats.add(f"pb={poses[i]}_{poses[i + 1]}")
        feats.add("len=" + self._length_bucket(len(tokens)))
        for flag in self._flags(tokens):
            feats.add(flag)
        idx = sorted(_hash(f, self.hash_space) for f in feats)
        return np.array(sorted(set(idx)), dtype=np.int64)

    @staticmethod
    def _length_bucket(n: int) -> str:
        for limit, name in _LENGTH_BUCKETS:
            if n <= limit:
                return name
        return "verylong"

    @staticmethod
    def _flags(tokens) -> list[str]:
        flags = []
        poses = {t.pos for t in tokens}
        if "NOUN" in poses:
            flags.append("has-noun")
        if "VERB" in poses:
            flags.append("has-verb")
        if "PUNCT" in poses:
            flags.append("has-punct")
        if "PREP" in poses:
            flags.append("has-preposition")
        if "DET" in poses:
            flags.append("has-determiner")
        if any(
            t.pos == "VERB" and morph.THIRD_SG in morph.verb_forms(t.surface, t.lemma)
            for t in tokens
        ):
            flags.append("has-3sg-verb")
        if any(
            t.pos == "NOUN" and morph.noun_number(t.surface, t.lemma) == "plur"
            for t in tokens
        ):
            flags.append("has-plural-noun")
        return flags


@dataclass
class TaggerModel:
    """Per-label logistic scorers plus a shared decision threshold."""

    extractor: FeatureExtractor
    inventory: TagInventory
    weights: np.ndarray  # (labels, hash_space)
    biases: np.ndarray  # (labels,)
    threshold: float = 0.5
    history: list[float] = field(default_factory=list)  # per-epoch mean loss

    def __post_init__(self):
        if not 0.0 < self.threshold < 1.0:
            raise ValueError("threshold must lie strictly between 0 and 1")

    def scores_from_features(self, idx: np.ndarray) -> np.ndarray:
        z = self.weights[:, idx].sum(axis=1) + self.biases
        return 1.0 / (1.0 + np.exp(-z))

    def scores(self, sentence: Sentence) -> np.ndarray:
        return self.scores_from_features(self.extractor.extract(sentence))

    def with_threshold(self, threshold: float) -> "TaggerModel":
        return replace(self, threshold=threshold)


def predict(model: TaggerModel, sentence: Sentence) -> TagSet:
    """Tags whose score clears the model threshold; may be empty."""
    scores = model.scores(sentence)
    return TagSet(
        tag for tag, s in zip(model.inventory, scores) if s >= model.threshold
    )


# ---------------------------------------------------------------------------
# Label-imbalance statistics and oversampling.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImbalanceReport:
    """Per-label imbalance ratios (most frequent count / this label's count).

    Labels with zero occurrences carry no ratio and do not enter MeanIR;
    a dataset without any labels reports the neutral MeanIR of 1.0.
    """

    irlbl: dict[ErrorTag, float]
    mean_ir: float


def imbalance_report(data: TaggedDataset) -> ImbalanceReport:
    counts = {tag: n for tag, n in data.label_counts.items() if n > 0}
    if not counts:
        return ImbalanceReport({}, 1.0)
    top = max(counts.values())
    irlbl = {tag: top / n for tag, n in counts.items()}
    return ImbalanceReport(irlbl, sum(irlbl.values()) / len(irlbl))


def oversample(
    data: TaggedDataset, growth_budget: float = 0.10, seed: int = 0
) -> TaggedDataset:
    """Multi-label random oversampling (clone instances bearing minority labels).

    Minority labels are those with IRLbl above the initial MeanIR. For each,
    uniformly random instances containing the label are cloned whole, with
    IRLbl recomputed after every clone, until the label reaches MeanIR or the
    total number of clones hits ``growth_budget * len(data)``.
    """
    if len(data) == 0:
        raise EmptyInputError("cannot oversample an empty dataset")
    if not 0 < growth_budget <= 1:
        raise DataError("growth_budget must be in (0, 1]")
    report = imbalance_report(data)
    if not report.irlbl:
        return data
    mean_ir = report.mean_ir
    max_clones = int(growth_budget * len(data))

    counts: dict[ErrorTag, int] = dict(data.label_counts)
    by_label: dict[ErrorTag, list[int]] = {tag: [] for tag in counts}
    for i, (_, tags) in enumerate(data):
        for tag in tags:
            by_label[tag].append(i)

    rng = random.Random(seed)
    clones: list = []
    minority = sorted(
        (tag for tag, ratio in report.irlbl.items() if ratio > mean_ir),
        key=lambda t: t.index,
    )
    for tag in minority:
        while len(clones) < max_clones:
            if max(counts.values()) / counts[tag] <= mean_ir:
                break
            pick = data.items[rng.choice(by_label[tag])]
            clones.append(pick)
            for t in pick[1]:
                counts[t] += 1
        if len(clones) >= max_clones:
            break
    if not clones:
        return data
    return TaggedDataset(data.items + tuple(clones))


# ---------------------------------------------------------------------------
# Training, thresholding, prediction.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 3
    learning_rate: float = 0.5
    batch_size: int = 16
    seed: int = 0
    hash_space: int = 2**18


def _labels_matrix(data: TaggedDataset, inventory: TagInventory) -> np.ndarray:
    y = np.zeros((len(data), len(inventory)), dtype=np.float64)
    for i, (_, tags) in enumerate(data):
        for tag in tags:
            y[i, tag.index] = 1.0
    return y


def train(
    data: TaggedDataset,
    config: TrainConfig = TrainConfig(),
    inventory: TagInventory = DEFAULT_INVENTORY,
) -> TaggerModel:
    """Mini-batch gradient descent on mean per-label binary cross-entropy.

    Deterministic under ``config.seed``: the epoch shuffles and every update
    are driven by a dedicated generator. Returns the model with the default
    0.5 threshold; run tune_threshold to pick an operating point.
    """
    if len(data) == 0:
        raise EmptyInputError("cannot train on an empty dataset")
    extractor = FeatureExtractor(config.hash_space)
    features = [extractor.extract(s) for s, _ in data]
    y = _labels_matrix(data, inventory)
    n, labels = y.shape

    weights = np.zeros((labels, config.hash_space), dtype=np.float64)
    biases = np.zeros(labels, dtype=np.float64)
    rng = np.random.default_rng(config.seed)
    history: list[float] = []

    for _ in range(config.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            deltas = []
            for i in batch:
                z = weights[:, features[i]].sum(axis=1) + biases
                # numerically stable BCE-with-logits
                epoch_loss += float(
                    np.mean(np.maximum(z, 0) - z * y[i] + np.log1p(np.exp(-np.abs(z))))
                )
                deltas.append(y[i] - 1.0 / (1.0 + np.exp(-z)))
            step = config.learning_rate / len(batch)
            for i, delta in zip(batch, deltas):
                weights[:, features[i]] += step * delta[:, None]
                biases += step * delta
        history.append(epoch_loss / n)

    return TaggerModel(extractor, inventory, weights, biases, history=history)


THRESHOLD_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))


def threshold_search(model: TaggerModel, dev: TaggedDataset) -> list[tuple[float, float]]:
    """Micro-averaged F0.5 on dev at every grid threshold."""
    if len(dev) == 0:
        raise EmptyInputError("cannot tune on an empty dev set")
    if all(len(tags) == 0 for _, tags in dev):
        raise TuningError("dev set has no positive labels")
    score_rows = [model.scores(sentence) for sentence, _ in dev]
    gold = _labels_matrix(dev, model.inventory)

    out = []
    for threshold in THRESHOLD_GRID:
        tp = fp = fn = 0
        for scores, row in zip(score_rows, gold):
            pred = scores >= threshold
            actual = row > 0
            tp += int(np.sum(pred & actual))
            fp += int(np.sum(pred & ~actual))
            fn += int(np.sum(~pred & actual))
        p = 100.0 * tp / (tp + fp) if tp + fp else 0.0
        r = 100.0 * tp / (tp + fn) if tp + fn else 0.0
        out.append((threshold, f_beta(p, r, 0.5)))
    return out


def tune_threshold(model: TaggerModel, dev: TaggedDataset) -> float:
    """Grid-search the threshold maximizing micro-averaged F0.5 on dev.

    Ties break toward the lower threshold, which favors recall at equal F0.5.
    """
    best_threshold, best_f = THRESHOLD_GRID[0], -1.0
    for threshold, f in threshold_search(model, dev):
        if f > best_f:
            best_threshold, best_f = threshold, f
    return best_threshold


def split_dev(
    data: TaggedDataset, fraction: float = 0.10, seed: int = 0
) -> tuple[TaggedDataset, TaggedDataset]:
    """Deterministic (train, dev) split; dev gets ``fraction`` of the items.

    Mirrors the oversample-then-split order of operations, which means clones
    of a held-out item may remain in the training portion (inherited leakage,
    flagged in the README).
    """
    if not 0 < fraction < 1:
        raise DataError("dev fraction must be in (0, 1)")
    order = list(range(len(data)))
    random.Random(seed).shuffle(order)
    dev_size = max(1, int(len(data) * fraction)) if len(data) > 1 else 0
    dev_idx = set(order[:dev_size])
    train_items = tuple(data.items[i] for i in range(len(data)) if i not in dev_idx)
    dev_items = tuple(data.items[i] for i in sorted(dev_idx))
    return TaggedDataset(train_items), TaggedDataset(dev_items)


# ---------------------------------------------------------------------------
# Model file format.
# ---------------------------------------------------------------------------


def save_model(model: TaggerModel, path: str) -> None:
    meta = {
        "format_version": MODEL_FORMAT_VERSION,
        "hash_space": model.extractor.hash_space,
        "threshold": model.threshold,
        "tags": list(model.inventory.names()),
        "history": model.history,
    }
    with open(path, "wb") as handle:
        np.savez_compressed(
            handle,
            weights=model.weights.astype(np.float64),
            biases=model.biases.astype(np.float64),
            meta=np.frombuffer(json.dumps(meta).encode("utf-8"), dtype=np.uint8),
        )


def load_model(path: str, inventory: TagInventory = DEFAULT_INVENTORY) -> TaggerModel:
    try:
        bundle = np.load(path)
        meta = json.loads(bytes(bundle["meta"]).decode("utf-8"))
    except (OSError, KeyError, ValueError) as exc:
        raise DataError(f"unreadable model file {path}: {exc}") from None
    if meta.get("format_version") != MODEL_FORMAT_VERSION:
        raise DataError(f"unsupported model format version {meta.get('format_version')}")
    if tuple(meta["tags"]) != inventory.names():
        raise DataError("model tag inventory does not match the configured inventory")
    return TaggerModel(
        extractor=FeatureExtractor(int(meta["hash_space"])),
        inventory=inventory,
        weights=bundle["weights"],
        biases=bundle["biases"],
        threshold=float(meta["threshold"]),
        history=list(meta.get("history", [])),
    )
