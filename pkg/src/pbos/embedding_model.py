"""Subword vector composition and SGD fitting against target embeddings.

Three composition variants share one trainable lookup table of subword
vectors:

* ``pbos``   - weighted sum of subword vectors, weights from the
  segmentation lattice (they sum to 1 per word);
* ``bos``    - uniform sum over boundary-marked character n-grams of
  bounded length, one unit of weight per occurrence;
* ``pbos-n`` - like ``pbos`` but every stored vector is L2-normalized
  before the weighted sum (zero vectors pass through).

Training runs plain per-word SGD on the mean-square loss against the
target vectors, with an optional inverse-square-root learning-rate decay.
Subword vectors start at zero on first touch, so an untrained model
composes the zero vector for every word.
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from . import io_formats, lattice
from .io_formats import TargetEmbeddings
from .subword_stats import SubwordTable

# Reserved boundary markers, assumed absent from the data alphabet.
BOUNDARY_START = "⟨"  # ⟨
BOUNDARY_END = "⟩"    # ⟩

MODEL_CONFIG_FILE = "config"
MODEL_SUBWORDS_FILE = "subwords.tsv"
MODEL_VECTORS_FILE = "vectors.txt"


class Variant(str, Enum):
    PBOS = "pbos"
    BOS = "bos"
    PBOS_N = "pbos-n"


@dataclass
class TrainConfig:
    """Training settings; the defaults are the word-similarity settings
    (50 epochs, lr 1.0 with inverse-square-root decay, prob_eps 0.01,
    n-grams of length 3..6 with boundary markers in bos mode)."""

    epochs: int = 50
    lr0: float = 1.0
    lr_decay: bool = True
    variant: Variant = Variant.PBOS
    bos_min_len: int = 3
    bos_max_len: int = 6
    bos_word_boundary: bool | None = None  # None: on for bos, off otherwise
    prob_eps: float = 0.01
    seed: int = 0

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.lr0 <= 0.0:
            raise ValueError(f"lr0 must be positive, got {self.lr0}")
        if not 1 <= self.bos_min_len <= self.bos_max_len:
            raise ValueError(
                f"need 1 <= bos_min_len <= bos_max_len, got "
                f"{self.bos_min_len}..{self.bos_max_len}"
            )
        if not 0.0 < self.prob_eps < 1.0:
            raise ValueError(f"prob_eps must be in (0, 1), got {self.prob_eps}")
        if not isinstance(self.variant, Variant):
            self.variant = Variant(self.variant)

    @property
    def use_word_boundary(self) -> bool:
        if self.bos_word_boundary is None:
            return self.variant is Variant.BOS
        return self.bos_word_boundary

    def learning_rate(self, epoch: int) -> float:
        """Learning rate for 1-based epoch ``epoch``."""
        return self.lr0 / math.sqrt(epoch) if self.lr_decay else self.lr0


@dataclass
class SubwordEmbeddings:
    """Trainable subword-to-vector lookup; vectors start all-zero on
    first touch and absent subwords compose as the zero vector."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def touch(self, subword: str) -> np.ndarray:
        vec = self.vectors.get(subword)
        if vec is None:
            vec = self.vectors[subword] = np.zeros(self.dim)
        return vec


def bos_subword_counts(
    word: str, min_len: int, max_len: int, word_boundary: bool
) -> Counter[str]:
    """Occurrence counts of character n-grams with lengths in
    [min_len, max_len], over the boundary-marked word when requested."""
    marked = BOUNDARY_START + word + BOUNDARY_END if word_boundary else word
    counts: Counter[str] = Counter()
    n = len(marked)
    for size in range(min_len, max_len + 1):
        for i in range(n - size + 1):
            counts[marked[i : i + size]] += 1
    return counts


def composition_weights(
    word: str, table: SubwordTable, config: TrainConfig
) -> list[tuple[str, float]]:
    """Per-subword composition weights for one word under a variant.

    ``bos`` gives one unit of weight per n-gram occurrence and ignores the
    probability table; the lattice weights are used otherwise.
    """
    if not word:
        raise ValueError("empty word")
    if config.variant is Variant.BOS:
        counts = bos_subword_counts(
            word, config.bos_min_len, config.bos_max_len, config.use_word_boundary
        )
        return [(sub, float(count)) for sub, count in counts.items()]
    return list(lattice.subword_weights(word, table).weights.items())


def _combine(
    pairs: list[tuple[str, float]], embeddings: SubwordEmbeddings, normalize: bool
) -> np.ndarray:
    out = np.zeros(embeddings.dim)
    for subword, weight in pairs:
        vec = embeddings.vectors.get(subword)
        if vec is None:
            continue
        if normalize:
            norm = float(np.linalg.norm(vec))
            if norm > 0.0:
                vec = vec / norm
        out += weight * vec
    return out


@dataclass
class PbosModel:
    """A frozen subword table plus trained subword vectors."""

    table: SubwordTable
    embeddings: SubwordEmbeddings
    config: TrainConfig
    loss_trace: list[float] = field(default_factory=list)

    def compose(self, word: str) -> np.ndarray:
        """Compose the vector for any word from its subword vectors."""
        pairs = composition_weights(word, self.table, self.config)
        return _combine(
            pairs, self.embeddings, normalize=self.config.variant is Variant.PBOS_N
        )

    def save(self, directory: str | Path) -> None:
        """Write ``config``, ``subwords.tsv`` and ``vectors.txt``."""
        path = Path(directory)
        path.mkdir(parents=True, exist_ok=True)
        with open(path / MODEL_CONFIG_FILE, "w", encoding="utf-8") as fh:
            for key, value in _config_to_mapping(self.config).items():
                fh.write(f"{key}\t{value}\n")
        with open(path / MODEL_SUBWORDS_FILE, "w", encoding="utf-8") as fh:
            io_formats.write_subwords(self.table, fh)
        with open(path / MODEL_VECTORS_FILE, "w", encoding="utf-8") as fh:
            io_formats.write_embeddings(self.embeddings.vectors, fh)

    @classmethod
    def load(cls, directory: str | Path) -> "PbosModel":
        path = Path(directory)
        with open(path / MODEL_CONFIG_FILE, encoding="utf-8") as fh:
            config = _config_from_mapping(dict(
                line.rstrip("\n").split("\t", 1) for line in fh if line.strip()
            ))
        with open(path / MODEL_SUBWORDS_FILE, encoding="utf-8") as fh:
            table = io_formats.read_subwords(fh)
        with open(path / MODEL_VECTORS_FILE, encoding="utf-8") as fh:
            stored = io_formats.read_embeddings(fh)
        embeddings = SubwordEmbeddings(dim=stored.dim, vectors=stored.entries)
        return cls(table=table, embeddings=embeddings, config=config)


def _config_to_mapping(config: TrainConfig) -> dict[str, str]:
    boundary = config.bos_word_boundary
    return {
        "epochs": str(config.epochs),
        "lr0": repr(config.lr0),
        "lr_decay": "true" if config.lr_decay else "false",
        "variant": config.variant.value,
        "bos_min_len": str(config.bos_min_len),
        "bos_max_len": str(config.bos_max_len),
        "bos_word_boundary": "auto" if boundary is None else ("on" if boundary else "off"),
        "prob_eps": repr(config.prob_eps),
        "seed": str(config.seed),
    }


def _config_from_mapping(mapping: dict[str, str]) -> TrainConfig:
    boundary_text = mapping.get("bos_word_boundary", "auto")
    boundary = None if boundary_text == "auto" else boundary_text == "on"
    return TrainConfig(
        epochs=int(mapping.get("epochs", "50")),
        lr0=float(mapping.get("lr0", "1.0")),
        lr_decay=mapping.get("lr_decay", "true") == "true",
        variant=Variant(mapping.get("variant", "pbos")),
        bos_min_len=int(mapping.get("bos_min_len", "3")),
        bos_max_len=int(mapping.get("bos_max_len", "6")),
        bos_word_boundary=boundary,
        prob_eps=float(mapping.get("prob_eps", "0.01")),
        seed=int(mapping.get("seed", "0")),
    )


def train(
    targets: TargetEmbeddings,
    table: SubwordTable,
    config: TrainConfig,
    on_epoch: Callable[[int, float], None] | None = None,
) -> PbosModel:
    """Fit subword vectors to ``targets`` by per-word SGD.

    The word order is reshuffled every epoch with the seeded generator, so
    runs are deterministic given the seed.  For each visited word the
    residual (composed minus target) is scaled by each subword's weight
    and subtracted from that subword's vector; the factor 2 of the exact
    squared-error gradient is absorbed into the learning rate.  The
    reported per-epoch loss is the mean of squared residuals as visited.

    Composition weights depend only on the frozen table, so they are
    computed once up front and cached for all epochs.
    """
    if not targets.entries:
        raise ValueError("empty target vocabulary")
    dim = targets.dim

    subword_rows: dict[str, int] = {}
    cached: list[tuple[np.ndarray, np.ndarray, np.ndarray]] = []
    for word, target in targets.entries.items():
        target = np.asarray(target, dtype=np.float64)
        if target.shape != (dim,):
            raise ValueError(
                f"target vector for {word!r} has shape {target.shape}, expected ({dim},)"
            )
        pairs = composition_weights(word, table, config)
        rows = np.empty(len(pairs), dtype=np.intp)
        weights = np.empty(len(pairs), dtype=np.float64)
        for pos, (subword, weight) in enumerate(pairs):
            row = subword_rows.setdefault(subword, len(subword_rows))
            rows[pos] = row
            weights[pos] = weight
        cached.append((rows, weights, target))

    matrix = np.zeros((len(subword_rows), dim))
    rng = np.random.default_rng(config.seed)
    normalize = config.variant is Variant.PBOS_N
    trace: list[float] = []
    for epoch in range(1, config.epochs + 1):
        lr = config.learning_rate(epoch)
        order = rng.permutation(len(cached))
        squared_sum = 0.0
        for index in order:
            rows, weights, target = cached[index]
            gathered = matrix[rows]
            if normalize:
                norms = np.linalg.norm(gathered, axis=1)
                composed = (weights / np.where(norms > 0.0, norms, 1.0)) @ gathered
            else:
                composed = weights @ gathered
            residual = composed - target
            squared_sum += float(residual @ residual)
            matrix[rows] = gathered - np.outer(lr * weights, residual)
        trace.append(squared_sum / len(cached))
        if on_epoch is not None:
            on_epoch(epoch, trace[-1])

    vectors = {subword: matrix[row] for subword, row in subword_rows.items()}
    embeddings = SubwordEmbeddings(dim=dim, vectors=vectors)
    return PbosModel(table=table, embeddings=embeddings, config=config, loss_trace=trace)


def loss(model: PbosModel, targets: TargetEmbeddings) -> float:
    """Mean squared L2 error of composed vectors against the targets."""
    if not targets.entries:
        raise ValueError("empty target vocabulary")
    if targets.dim != model.embeddings.dim:
        raise ValueError(
            f"dimension mismatch: targets {targets.dim}, model {model.embeddings.dim}"
        )
    total = 0.0
    for word, target in targets.entries.items():
        diff = model.compose(word) - np.asarray(target, dtype=np.float64)
        total += float(diff @ diff)
    return total / len(targets.entries)


def gradient_check(
    model: PbosModel,
    targets: TargetEmbeddings,
    h: float = 1e-5,
    seed: int = 0,
    max_coords_per_word: int = 64,
) -> float:
    """Max relative error between the analytic per-word gradient
    (2 * weight * residual) and central finite differences of the squared
    error, over sampled coordinates.

    Coordinates are sampled among subwords carrying non-negligible weight
    and where the analytic gradient is non-negligible; elsewhere the
    finite-difference signal drowns in floating-point roundoff.  Intended
    for small models (a few words, small dimension).
    """
    if model.config.variant is Variant.PBOS_N:
        raise ValueError(
            "gradient check covers the pbos and bos variants; the pbos-n "
            "update deliberately does not differentiate through the norm"
        )
    rng = np.random.default_rng(seed)
    embeddings = model.embeddings
    worst = 0.0
    for word, target in targets.entries.items():
        target = np.asarray(target, dtype=np.float64)
        pairs = [
            (sub, weight)
            for sub, weight in composition_weights(word, model.table, model.config)
            if weight >= 1e-3
        ]
        if not pairs:
            continue
        residual = model.compose(word) - target
        coords = [
            (sub, weight, col)
            for sub, weight in pairs
            for col in range(embeddings.dim)
            if abs(2.0 * weight * residual[col]) >= 1e-4
        ]
        if len(coords) > max_coords_per_word:
            picked = rng.choice(len(coords), size=max_coords_per_word, replace=False)
            coords = [coords[i] for i in picked]
        for subword, weight, col in coords:
            analytic = 2.0 * weight * residual[col]
            vec = embeddings.touch(subword)
            original = vec[col]
            vec[col] = original + h
            diff = model.compose(word) - target
            f_plus = float(diff @ diff)
            vec[col] = original - h
            diff = model.compose(word) - target
            f_minus = float(diff @ diff)
            vec[col] = original
            numeric = (f_plus - f_minus) / (2.0 * h)
            error = abs(analytic - numeric) / max(1e-8, abs(numeric))
            worst = max(worst, error)
    return worst
