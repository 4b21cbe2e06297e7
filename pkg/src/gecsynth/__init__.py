"""Synthetic training-data generation for grammatical error correction.

Two-stage pipeline: a multi-label tagger predicts which error types a correct
sentence could plausibly contain, and a tag-conditioned corruptor introduces
those errors. The annotation machinery (tokenizer, aligner, classifier) mines
training signal from parallel corpora and audits generated output.
"""

from .core import (
    DEFAULT_INVENTORY,
    DEFAULT_TAG_NAMES,
    AnnotatedToken,
    Edit,
    ErrorTag,
    ParallelPair,
    Sentence,
    TagInventory,
    TagSet,
    TaggedDataset,
    filter_noop,
    tagset_from_edits,
)
from .aligner import AlignConfig, AlignmentOp, align, extract_edits
from .classifier import RuleTable, annotate_pair, classify_edit
from .corruptor import (
    CorruptionResult,
    EditInventory,
    ExternalBackend,
    corrupt,
    decode_prefix,
    encode_prefix,
    mine_inventory,
    verify_realized,
)
from .errors import (
    BackendError,
    DataError,
    EmptyInputError,
    EmptyInventoryError,
    GecSynthError,
    ParseError,
    TuningError,
)
from .metrics import ConfusionCounts, Score, bleu, f_beta, gec_score, multilabel_score
from .pipeline import GenerationRecord, GenerationSummary, PipelineConfig, generate
from .tagger import (
    FeatureExtractor,
    ImbalanceReport,
    TaggerModel,
    TrainConfig,
    imbalance_report,
    load_model,
    oversample,
    predict,
    save_model,
    train,
    tune_threshold,
)
from .tokenizer import Annotator, default_annotator

__version__ = "0.1.0"
