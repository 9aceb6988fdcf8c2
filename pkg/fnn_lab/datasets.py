"""
Datasets: ข้อมูลสังเคราะห์ (|x| และ indicator ของ ball), MNIST IDX loader และ text corpus ของ SCRN

ทุก generator เป็น pure function ของ (seed, parameters) ผ่าน numerics.Rng
Dataset ทุกตัว immutable หลังสร้าง
"""

import dataclasses
import gzip
import logging
import math
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (CorpusError, CountMismatchError, DomainError, IdxFormatError, MissingDataError,
                     SplitError, TruncatedFileError)
from .numerics import Rng, ensure_finite

logger = logging.getLogger(__name__)

SPLITS = ('train', 'valid', 'test')

VOLUME_UNIFORM = 'volume_uniform'
RADIUS_UNIFORM = 'radius_uniform'
RADIAL_MODES = (VOLUME_UNIFORM, RADIUS_UNIFORM)

# ถ้าสัดส่วน positive outer_radius^−d ต่ำกว่านี้ ใช้ radius_uniform
MIN_POSITIVE_FRACTION = 0.01

IMAGES_MAGIC = 0x00000803
LABELS_MAGIC = 0x00000801
IMAGE_SIDE = 28
IMAGE_PIXELS = IMAGE_SIDE * IMAGE_SIDE
N_CLASSES = 10

EOS = '<eos>'
UNK = '<unk>'


@dataclass(frozen=True)
class Dataset:
    inputs: np.ndarray
    targets: np.ndarray
    split: str = 'train'
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.inputs) != len(self.targets):
            raise CountMismatchError(
                f"{len(self.inputs)} inputs vs {len(self.targets)} targets"
            )
        if self.split not in SPLITS:
            raise SplitError(f"unknown split {self.split!r}")

    def __len__(self):
        return len(self.targets)

    @property
    def d(self):
        return self.inputs.shape[1]

    def subset(self, indices, split=None):
        return dataclasses.replace(
            self,
            inputs=self.inputs[indices],
            targets=self.targets[indices],
            split=split or self.split,
            metadata=dict(self.metadata),
        )


@dataclass(frozen=True)
class RegressionDataset(Dataset):

    def __post_init__(self):
        super().__post_init__()
        ensure_finite(self.inputs, 'inputs')
        ensure_finite(self.targets, 'targets')

    @property
    def X(self):
        return self.inputs

    @property
    def y(self):
        return self.targets


@dataclass(frozen=True)
class MnistDataset(Dataset):

    def __post_init__(self):
        super().__post_init__()
        if len(self.targets) and (self.targets.min() < 0 or self.targets.max() >= N_CLASSES):
            raise IdxFormatError("labels must lie in 0..9")

    @property
    def images(self):
        return self.inputs

    @property
    def labels(self):
        return self.targets


# --- synthetic ---

def sample_abs(count, seed, split='train'):
    """x ~ Uniform[−π, π], y = |x| (ไม่มี noise)"""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    x = Rng(seed).uniform(-math.pi, math.pi, size=(count, 1))
    return RegressionDataset(
        inputs=x, targets=np.abs(x[:, 0]), split=split,
        metadata={'task': 'abs', 'seed': seed},
    )


def default_radial_mode(d, outer_radius):
    """
    volume_uniform ถ้า outer_radius^−d ≥ 1% ไม่งั้น radius_uniform
    เช่น d = 10, outer_radius = 2: สัดส่วน positive แบบ volume_uniform เหลือ 2^−10 จึงใช้ radius_uniform (positive ครึ่งหนึ่ง)
    """
    return VOLUME_UNIFORM if outer_radius ** (-d) >= MIN_POSITIVE_FRACTION else RADIUS_UNIFORM


def sample_ball_indicator(count, d, outer_radius, seed, radial_mode=None, split='train'):
    """
    Function: sample_ball_indicator
    หน้าที่: สุ่มจุดใน ball รัศมี outer_radius, target = I[‖x‖ ≤ 1]
    - ทิศทาง: Gaussian vector ที่ normalize แล้ว
    - รัศมี: outer_radius·U^{1/d} (volume_uniform) หรือ outer_radius·U (radius_uniform)
    """
    if count < 1 or d < 1:
        raise DomainError(f"count and d must be >= 1, got count={count}, d={d}")
    if outer_radius <= 1:
        raise DomainError(f"outer radius must exceed 1, got {outer_radius}")
    radial_mode = radial_mode or default_radial_mode(d, outer_radius)
    if radial_mode not in RADIAL_MODES:
        raise DomainError(f"radial mode must be one of {RADIAL_MODES}, got {radial_mode!r}")

    rng = Rng(seed)
    direction = rng.normal(size=(count, d))
    norms = np.linalg.norm(direction, axis=1)
    # norm เป็น 0 ได้แค่ในทางทฤษฎี
    norms[norms == 0.0] = 1.0
    direction /= norms[:, np.newaxis]
    u = rng.uniform(size=count)
    if radial_mode == VOLUME_UNIFORM:
        radius = outer_radius * u ** (1.0 / d)
    else:
        radius = outer_radius * u
    x = direction * radius[:, np.newaxis]
    y = (np.linalg.norm(x, axis=1) <= 1.0).astype(np.float64)
    logger.debug("ball sample d=%d mode=%s positive fraction %.4f", d, radial_mode, y.mean())
    return RegressionDataset(
        inputs=x, targets=y, split=split,
        metadata={'task': 'ball', 'seed': seed, 'd': d,
                  'outer_radius': outer_radius, 'radial_mode': radial_mode},
    )


# --- MNIST IDX ---

def _read_bytes(path):
    path = Path(path)
    if not path.is_file():
        raise MissingDataError(f"file not found: {path}")
    if path.suffix == '.gz':
        with gzip.open(path, 'rb') as handle:
            return handle.read()
    return path.read_bytes()


def _read_idx_images(path):
    raw = _read_bytes(path)
    if len(raw) < 16:
        raise TruncatedFileError(f"{path}: images header needs 16 bytes, file has {len(raw)}")
    magic, count, rows, cols = struct.unpack('>IIII', raw[:16])
    if magic != IMAGES_MAGIC:
        raise IdxFormatError(
            f"{path}: bad images magic 0x{magic:08x}, expected 0x{IMAGES_MAGIC:08x}"
        )
    if rows != IMAGE_SIDE or cols != IMAGE_SIDE:
        raise IdxFormatError(f"{path}: expected {IMAGE_SIDE}x{IMAGE_SIDE} images, got {rows}x{cols}")
    need = count * IMAGE_PIXELS
    if len(raw) - 16 < need:
        raise TruncatedFileError(f"{path}: header promises {count} images, payload holds {len(raw) - 16} of {need} bytes")
    pixels = np.frombuffer(raw, dtype=np.uint8, count=need, offset=16)
    return pixels.reshape(count, IMAGE_PIXELS)


def _read_idx_labels(path):
    raw = _read_bytes(path)
    if len(raw) < 8:
        raise TruncatedFileError(f"{path}: labels header needs 8 bytes, file has {len(raw)}")
    magic, count = struct.unpack('>II', raw[:8])
    if magic != LABELS_MAGIC:
        raise IdxFormatError(
            f"{path}: bad labels magic 0x{magic:08x}, expected 0x{LABELS_MAGIC:08x}"
        )
    if len(raw) - 8 < count:
        raise TruncatedFileError(f"{path}: header promises {count} labels, payload holds {len(raw) - 8}")
    labels = np.frombuffer(raw, dtype=np.uint8, count=count, offset=8)
    if count and labels.max() >= N_CLASSES:
        raise IdxFormatError(f"{path}: label {labels.max()} outside 0..9")
    return labels


def load_mnist(images_path, labels_path, split='train'):
    """
    Function: load_mnist
    หน้าที่: อ่านไฟล์ IDX (ธรรมดาหรือ .gz) เป็น MnistDataset, pixel/255 -> [0, 1]
    """
    pixels = _read_idx_images(images_path)
    labels = _read_idx_labels(labels_path)
    if len(pixels) != len(labels):
        raise CountMismatchError(
            f"{images_path} has {len(pixels)} images but {labels_path} has {len(labels)} labels"
        )
    logger.info("loaded %d MNIST samples from %s", len(labels), images_path)
    return MnistDataset(
        inputs=pixels.astype(np.float64) / 255.0,
        targets=labels.astype(np.int64),
        split=split,
        metadata={'images': str(images_path), 'labels': str(labels_path)},
    )


def write_mnist(images_path, labels_path, pixels, labels):
    """เขียน IDX; pixels เป็น uint8 (T×784 หรือ T×28×28) หรือ float ใน [0, 1]"""
    pixels = np.asarray(pixels)
    if pixels.dtype != np.uint8:
        pixels = np.rint(np.clip(pixels, 0.0, 1.0) * 255.0).astype(np.uint8)
    pixels = pixels.reshape(len(pixels), IMAGE_PIXELS)
    labels = np.asarray(labels, dtype=np.uint8)
    if len(pixels) != len(labels):
        raise CountMismatchError(f"{len(pixels)} images vs {len(labels)} labels")
    image_bytes = struct.pack('>IIII', IMAGES_MAGIC, len(pixels), IMAGE_SIDE, IMAGE_SIDE) + pixels.tobytes()
    label_bytes = struct.pack('>II', LABELS_MAGIC, len(labels)) + labels.tobytes()
    for path, payload in ((Path(images_path), image_bytes), (Path(labels_path), label_bytes)):
        if path.suffix == '.gz':
            with gzip.open(path, 'wb') as handle:
                handle.write(payload)
        else:
            path.write_bytes(payload)


def mnist_paths(directory):
    """หาไฟล์ชื่อมาตรฐานของ MNIST ใน directory (ธรรมดาก่อน แล้ว .gz)"""
    directory = Path(directory)
    names = {
        'train_images': 'train-images-idx3-ubyte',
        'train_labels': 'train-labels-idx1-ubyte',
        'test_images': 't10k-images-idx3-ubyte',
        'test_labels': 't10k-labels-idx1-ubyte',
    }
    paths = {}
    for key, name in names.items():
        for candidate in (directory / name, directory / f'{name}.gz'):
            if candidate.is_file():
                paths[key] = candidate
                break
        else:
            raise MissingDataError(f"{name} (or {name}.gz) not found in {directory}")
    return paths


# --- split ---

def _resolve_size(value, total):
    if isinstance(value, float) and 0.0 < value <= 1.0:
        return int(math.floor(value * total))
    if isinstance(value, float) and not value.is_integer():
        raise SplitError(f"split size {value} is neither a fraction nor a count")
    size = int(value)
    if size < 0:
        raise SplitError(f"split size must be nonnegative, got {value}")
    return size


def split(dataset, sizes, seed):
    """
    Function: split
    หน้าที่: แบ่ง dataset ตาม sizes (ชื่อ split -> จำนวนหรือสัดส่วน) ด้วย permutation ที่ seed กำหนด
    seed เป็น int หรือ Rng stream ก็ได้
    ชิ้นที่ได้เป็นช่วงต่อเนื่องของ permutation ตามลำดับใน sizes จึงไม่ซ้อนกัน
    """
    total = len(dataset)
    counts = {name: _resolve_size(value, total) for name, value in sizes.items()}
    requested = sum(counts.values())
    if requested > total:
        raise SplitError(f"requested {requested} samples from a dataset of {total}")
    rng = seed if isinstance(seed, Rng) else Rng(seed)
    order = rng.permutation(total)
    parts = {}
    start = 0
    for name, count in counts.items():
        parts[name] = dataset.subset(order[start:start + count], split=name if name in SPLITS else None)
        start += count
    return parts


# --- corpus ---

class Vocabulary:
    """token <-> id; id เรียงตามลำดับที่เจอครั้งแรก, <unk> อยู่ท้ายสุด"""

    def __init__(self, tokens):
        self.tokens = list(tokens)
        if UNK not in self.tokens:
            self.tokens.append(UNK)
        self.index = {token: i for i, token in enumerate(self.tokens)}
        if len(self.index) != len(self.tokens):
            raise CorpusError("vocabulary contains duplicate tokens")

    @classmethod
    def from_lines(cls, lines):
        seen = {}
        for line in lines:
            for token in line.split() + [EOS]:
                seen.setdefault(token, len(seen))
        return cls(seen)

    def __len__(self):
        return len(self.tokens)

    def __contains__(self, token):
        return token in self.index

    @property
    def eos_id(self):
        return self.index[EOS]

    @property
    def unk_id(self):
        return self.index[UNK]

    def encode(self, token):
        return self.index.get(token, self.unk_id)

    def decode(self, token_id):
        return self.tokens[token_id]


@dataclass(frozen=True)
class Corpus:
    ids: np.ndarray
    vocab: Vocabulary

    def __post_init__(self):
        if len(self.ids) and int(self.ids.max()) >= len(self.vocab):
            raise CorpusError("token id outside vocabulary")

    def __len__(self):
        return len(self.ids)


def _read_lines(text_path):
    path = Path(text_path)
    if not path.is_file():
        raise MissingDataError(f"corpus file not found: {path}")
    lines = path.read_text(encoding='utf-8').splitlines()
    if not any(line.split() for line in lines):
        raise CorpusError(f"{path}: corpus file is empty")
    return lines


def load_corpus(text_path, vocab=None):
    """
    Function: load_corpus
    หน้าที่: ตัด token ด้วย whitespace, ต่อท้ายแต่ละบรรทัดด้วย <eos>
    vocab=None -> สร้าง vocabulary จากไฟล์นี้ (training split); token นอก vocab -> <unk>
    """
    lines = _read_lines(text_path)
    if vocab is None:
        vocab = Vocabulary.from_lines(lines)
    ids = [vocab.encode(token) for line in lines for token in line.split() + [EOS]]
    return Corpus(ids=np.array(ids, dtype=np.int64), vocab=vocab)


def load_corpus_splits(directory):
    """train.txt / valid.txt / test.txt ที่ใช้ vocabulary ของ train ร่วมกัน"""
    directory = Path(directory)
    train = load_corpus(directory / 'train.txt')
    valid = load_corpus(directory / 'valid.txt', vocab=train.vocab)
    test = load_corpus(directory / 'test.txt', vocab=train.vocab)
    logger.info("corpus %s: vocab %d, tokens %d/%d/%d",
                directory, len(train.vocab), len(train), len(valid), len(test))
    return {'train': train, 'valid': valid, 'test': test}
