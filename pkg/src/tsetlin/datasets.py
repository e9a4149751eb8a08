"""Dataset generation, binarization, splitting, and file I/O.

The on-disk dataset format is ASCII: a header line "o n_classes count"
followed by one row per line, o space-separated bits then the class label.
Real-valued sources come in through comma-separated CSV (last column is the
label) and are turned into bits by the threshold or min-max quantization
binarizers.
"""

from __future__ import annotations

import gzip
import os
import struct
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DatasetFormatError


@dataclass
class BinaryDataset:
    X: np.ndarray
    y: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.X = np.ascontiguousarray(np.asarray(self.X, dtype=np.uint8))
        self.y = np.asarray(self.y, dtype=np.int64)
        if self.X.ndim != 2:
            raise ConfigError("X must be a 2-D bit matrix")
        if self.X.shape[0] != self.y.shape[0]:
            raise ConfigError("X and y row counts differ")
        if self.X.size and self.X.max() > 1:
            raise ConfigError("X must contain only 0/1 values")
        if self.n_classes < 2:
            raise ConfigError("n_classes must be >= 2")
        if self.y.size and (self.y.min() < 0 or self.y.max() >= self.n_classes):
            raise ConfigError("labels must lie in [0, n_classes)")

    @property
    def o(self) -> int:
        return self.X.shape[1]

    @property
    def count(self) -> int:
        return self.X.shape[0]

    def take(self, indices: np.ndarray) -> "BinaryDataset":
        return BinaryDataset(self.X[indices], self.y[indices], self.n_classes)


def gen_noisy_xor(
    count: int,
    o: int = 12,
    noise: float = 0.4,
    informative: tuple[int, int] = (1, 2),
    seed: int = 0,
) -> BinaryDataset:
    """Uniform o-bit rows labelled by the XOR of the two informative inputs
    (1-based positions), with each label flipped independently with
    probability `noise`."""
    k1, k2 = informative
    if k1 == k2 or not (1 <= k1 <= o) or not (1 <= k2 <= o):
        raise ConfigError(f"informative positions must be distinct and in 1..{o}")
    if not 0.0 <= noise < 0.5:
        raise ConfigError(f"noise must lie in [0, 0.5), got {noise}")
    if count < 1:
        raise ConfigError("count must be positive")
    rng = np.random.default_rng(seed)
    X = rng.integers(0, 2, size=(count, o), dtype=np.uint8)
    y = (X[:, k1 - 1] ^ X[:, k2 - 1]).astype(np.int64)
    if noise > 0.0:
        y ^= rng.random(count) < noise
    return BinaryDataset(X, y, 2)


def flip_labels(dataset: BinaryDataset, prob: float, seed: int) -> BinaryDataset:
    """Independently invert binary labels with the given probability."""
    if dataset.n_classes != 2:
        raise ConfigError("label flipping is defined for binary datasets")
    rng = np.random.default_rng(seed)
    y = dataset.y ^ (rng.random(dataset.count) < prob)
    return BinaryDataset(dataset.X.copy(), y, 2)


def binarize_threshold(values: np.ndarray, threshold: float = 0.3) -> np.ndarray:
    """1 where strictly greater than the threshold, else 0."""
    return (np.asarray(values) > threshold).astype(np.uint8)


def feature_ranges(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    values = np.asarray(values, dtype=np.float64)
    return values.min(axis=0), values.max(axis=0)


def quantize_bits(
    values: np.ndarray,
    bits_per_feature: int,
    ranges: tuple[np.ndarray, np.ndarray] | None = None,
) -> np.ndarray:
    """Min-max scale each feature, quantize uniformly into 2**b levels, and
    emit each level as its b-bit big-endian code, concatenated feature-wise.

    `ranges` supplies (lo, hi) computed on the training split; values outside
    clip to the extreme levels. Degenerate features (hi == lo) map to level 0.
    """
    if bits_per_feature < 1:
        raise ConfigError("bits_per_feature must be >= 1")
    values = np.asarray(values, dtype=np.float64)
    lo, hi = feature_ranges(values) if ranges is None else ranges
    span = np.where(hi > lo, hi - lo, 1.0)
    levels = np.floor((values - lo) / span * (1 << bits_per_feature))
    levels = np.clip(levels, 0, (1 << bits_per_feature) - 1).astype(np.int64)
    levels[:, hi <= lo] = 0
    n, f = values.shape
    out = np.zeros((n, f * bits_per_feature), dtype=np.uint8)
    for p in range(bits_per_feature):  # big-endian: bit 0 of the code is the MSB
        out[:, p::bits_per_feature] = (levels >> (bits_per_feature - 1 - p)) & 1
    return out


def split(
    dataset: BinaryDataset, train_fraction: float, seed: int
) -> tuple[BinaryDataset, BinaryDataset]:
    """Seeded shuffle, then prefix split (no stratification)."""
    if not 0.0 <= train_fraction <= 1.0:
        raise ConfigError("train_fraction must lie in [0, 1]")
    perm = np.random.default_rng(seed).permutation(dataset.count)
    n_train = int(dataset.count * train_fraction)
    return dataset.take(perm[:n_train]), dataset.take(perm[n_train:])


def save_dataset(dataset: BinaryDataset, path):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{dataset.o} {dataset.n_classes} {dataset.count}\n")
        for row, label in zip(dataset.X, dataset.y):
            fh.write(" ".join(str(int(b)) for b in row) + f" {int(label)}\n")


def load_dataset(path) -> BinaryDataset:
    with open(path, "r", encoding="ascii") as fh:
        header = fh.readline().split()
        if len(header) != 3:
            raise DatasetFormatError("header must be 'o n_classes count'", line=1)
        try:
            o, n_classes, count = (int(v) for v in header)
        except ValueError:
            raise DatasetFormatError(f"bad header {header!r}", line=1) from None
        X = np.zeros((count, o), dtype=np.uint8)
        y = np.zeros(count, dtype=np.int64)
        for i in range(count):
            line_no = i + 2
            parts = fh.readline().split()
            if len(parts) != o + 1:
                raise DatasetFormatError(
                    f"expected {o} bits and a label, got {len(parts)} fields",
                    line=line_no,
                )
            for k, tok in enumerate(parts[:o]):
                if tok not in ("0", "1"):
                    raise DatasetFormatError(f"bad bit {tok!r}", line=line_no)
                X[i, k] = tok == "1"
            try:
                y[i] = int(parts[o])
            except ValueError:
                raise DatasetFormatError(
                    f"bad label {parts[o]!r}", line=line_no
                ) from None
    try:
        return BinaryDataset(X, y, n_classes)
    except ConfigError as exc:
        raise DatasetFormatError(str(exc)) from None


def load_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Comma-separated real-valued rows, last column an integer class label."""
    rows, labels = [], []
    with open(path, "r", encoding="ascii") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) < 2:
                raise DatasetFormatError("need features and a label", line=line_no)
            try:
                rows.append([float(v) for v in parts[:-1]])
                label = float(parts[-1])
            except ValueError:
                raise DatasetFormatError(
                    f"unparseable value in {line!r}", line=line_no
                ) from None
            if label != int(label):
                raise DatasetFormatError(
                    f"label {parts[-1]!r} is not an integer", line=line_no
                )
            labels.append(int(label))
    if not rows:
        raise DatasetFormatError("no data rows")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise DatasetFormatError(f"inconsistent row widths {sorted(widths)}")
    return np.array(rows, dtype=np.float64), np.array(labels, dtype=np.int64)


# --- MNIST ingestion (user-supplied files; nothing is downloaded) -----------


def _read_idx(path) -> np.ndarray:
    opener = gzip.open if str(path).endswith(".gz") else open
    with opener(path, "rb") as fh:
        magic, = struct.unpack(">i", fh.read(4))
        ndim = magic & 0xFF
        shape = struct.unpack(f">{ndim}i", fh.read(4 * ndim))
        return np.frombuffer(fh.read(), dtype=np.uint8).reshape(shape)


def load_mnist(source) -> tuple[tuple[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]]:
    """Load MNIST from a keras-style .npz or a directory of idx(.gz) files.

    Returns ((train_images, train_labels), (test_images, test_labels)) with
    images flattened to (n, 784) floats in [0, 1].
    """
    source = str(source)
    if source.endswith(".npz"):
        with np.load(source) as data:
            splits = (
                (data["x_train"], data["y_train"]),
                (data["x_test"], data["y_test"]),
            )
    else:
        def find(stem):
            for name in (f"{stem}", f"{stem}.gz"):
                p = os.path.join(source, name)
                if os.path.exists(p):
                    return p
            raise DatasetFormatError(f"missing MNIST file {stem}[.gz] in {source}")

        splits = (
            (_read_idx(find("train-images-idx3-ubyte")),
             _read_idx(find("train-labels-idx1-ubyte"))),
            (_read_idx(find("t10k-images-idx3-ubyte")),
             _read_idx(find("t10k-labels-idx1-ubyte"))),
        )
    out = []
    for images, labels in splits:
        images = images.reshape(images.shape[0], -1).astype(np.float64) / 255.0
        out.append((images, labels.astype(np.int64)))
    return out[0], out[1]
