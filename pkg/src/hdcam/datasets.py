"""Dataset ingestion and seeded synthetic generators.

File formats: feature_csv is comma-separated, one sample per line, label in
the last column; text_corpus is one "label<TAB>text" line per sample. The
synthetic generators provide desk-scale stand-ins: Gaussian feature blobs, a
letter-Markov language corpus, and planted hypervector blobs for clustering.
"""

import string
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyDatasetError, ParseError
from .hvcore import BipolarHV, random_hv

DATASET_KINDS = ("feature_csv", "text_corpus", "synthetic_blobs")


@dataclass
class Dataset:
    """Samples plus optional labels and range metadata."""

    kind: str
    samples: list
    labels: list = None
    metadata: dict = field(default_factory=dict)

    @property
    def n(self):
        return len(self.samples)


@dataclass
class SyntheticSpec:
    """Parameters of the built-in generators."""

    kind: str = "records"
    samples: int = 600
    classes: int = 4
    features: int = 9
    noise: float = 0.05
    languages: int = 4
    text_length: int = 101
    blob_points: int = 40
    blob_max_flip_fraction: float = 1 / 16

    def __post_init__(self):
        if self.kind not in ("records", "languages", "hv_blobs"):
            raise ValueError(f"unknown synthetic kind: {self.kind!r}")


def _feature_metadata(rows):
    arr = np.asarray(rows, dtype=np.float64)
    return {
        "feature_min": arr.min(axis=0).tolist(),
        "feature_max": arr.max(axis=0).tolist(),
    }


def ingest(path, kind):
    """Parse a dataset file; errors carry the offending line number."""
    if kind == "feature_csv":
        samples, labels = [], []
        arity = None
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.strip()
                if not line:
                    continue
                parts = line.split(",")
                if len(parts) < 2:
                    raise ParseError(f"line {lineno}: need features and a label", line=lineno)
                if arity is None:
                    arity = len(parts)
                elif len(parts) != arity:
                    raise ParseError(
                        f"line {lineno}: expected {arity} fields, got {len(parts)}",
                        line=lineno,
                    )
                try:
                    samples.append([float(v) for v in parts[:-1]])
                except ValueError:
                    raise ParseError(f"line {lineno}: non-numeric feature", line=lineno)
                labels.append(parts[-1].strip())
        if not samples:
            raise EmptyDatasetError(f"no samples in {path}")
        return Dataset("feature_csv", samples, labels, _feature_metadata(samples))
    if kind == "text_corpus":
        samples, labels = [], []
        with open(path) as f:
            for lineno, raw in enumerate(f, 1):
                line = raw.rstrip("\n")
                if not line.strip():
                    continue
                if "\t" not in line:
                    raise ParseError(f"line {lineno}: expected label<TAB>text", line=lineno)
                label, text = line.split("\t", 1)
                if not label.strip() or not text:
                    raise ParseError(f"line {lineno}: empty label or text", line=lineno)
                samples.append(text)
                labels.append(label.strip())
        if not samples:
            raise EmptyDatasetError(f"no samples in {path}")
        return Dataset("text_corpus", samples, labels, {})
    raise ParseError(f"unknown dataset kind: {kind!r}")


def make_record_blobs(spec, rng):
    """Gaussian class blobs in feature space, clipped to [0, 1]."""
    gen = rng.generator
    protos = gen.uniform(0.0, 1.0, size=(spec.classes, spec.features))
    samples, labels = [], []
    for i in range(spec.samples):
        c = i % spec.classes
        x = np.clip(protos[c] + gen.normal(0.0, spec.noise, size=spec.features), 0.0, 1.0)
        samples.append(x.tolist())
        labels.append(f"class_{c}")
    return Dataset("feature_csv", samples, labels, _feature_metadata(samples))


def make_language_corpus(spec, rng):
    """Seeded letter-Markov corpus: one transition matrix per language."""
    gen = rng.generator
    alphabet = string.ascii_lowercase
    a = len(alphabet)
    samples, labels = [], []
    transitions = [gen.dirichlet(np.full(a, 0.3), size=a) for _ in range(spec.languages)]
    initials = [gen.dirichlet(np.full(a, 0.3)) for _ in range(spec.languages)]
    for i in range(spec.samples):
        lang = i % spec.languages
        chars = [int(gen.choice(a, p=initials[lang]))]
        for _ in range(spec.text_length - 1):
            chars.append(int(gen.choice(a, p=transitions[lang][chars[-1]])))
        samples.append("".join(alphabet[c] for c in chars))
        labels.append(f"lang_{lang}")
    return Dataset("text_corpus", samples, labels, {"alphabet": alphabet})


def make_hv_blobs(K, points_per_blob, dim, rng, max_flip_fraction=1 / 16):
    """Planted hypervector blobs: each point flips at most dim * fraction bits
    of its blob center. Returns a synthetic_blobs dataset with planted labels
    and centers in the metadata."""
    gen = rng.generator
    max_flips = int(dim * max_flip_fraction)
    centers = [random_hv(dim, rng) for _ in range(K)]
    points, labels = [], []
    for k, center in enumerate(centers):
        for _ in range(points_per_blob):
            n_flips = int(gen.integers(0, max_flips + 1))
            bits = center.bits.copy()
            if n_flips:
                idx = gen.choice(dim, size=n_flips, replace=False)
                bits[idx] ^= 1
            points.append(BipolarHV(dim, bits))
            labels.append(k)
    return Dataset(
        "synthetic_blobs", points, labels, {"centers": centers, "max_flips": max_flips}
    )


def purity(assignments, labels):
    """Fraction of points whose cluster's majority label matches their own."""
    assignments = np.asarray(assignments)
    labels = np.asarray(labels)
    correct = 0
    for k in np.unique(assignments):
        members = labels[assignments == k]
        if len(members):
            _, counts = np.unique(members, return_counts=True)
            correct += counts.max()
    return correct / len(labels)


def train_test_indices(n, test_fraction, seed):
    """Deterministic shuffled split; a pure function of (n, test_fraction, seed)."""
    if not 0 < test_fraction < 1:
        raise ValueError("test_fraction must be in (0, 1)")
    perm = np.random.default_rng(seed).permutation(n)
    n_test = max(1, int(round(n * test_fraction)))
    return np.sort(perm[n_test:]), np.sort(perm[:n_test])
