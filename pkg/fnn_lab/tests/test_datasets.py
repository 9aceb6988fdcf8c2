import gzip
import math
import struct

import numpy as np
import pytest
from scipy import stats

from fnn_lab.datasets import (RADIUS_UNIFORM, VOLUME_UNIFORM, Vocabulary, default_radial_mode, load_corpus,
                              load_corpus_splits, load_mnist, mnist_paths, sample_abs, sample_ball_indicator,
                              split, write_mnist)
from fnn_lab.errors import (CorpusError, CountMismatchError, DomainError, IdxFormatError, MissingDataError,
                            SplitError, TruncatedFileError)
from fnn_lab.numerics import Rng


def test_abs_samples_are_uniform_with_exact_targets():
    data = sample_abs(100_000, seed=0)
    assert data.d == 1
    np.testing.assert_array_equal(data.y, np.abs(data.X[:, 0]))
    assert data.X.min() >= -math.pi and data.X.max() <= math.pi
    assert abs(data.X.mean()) <= 0.02
    assert data.y.mean() == pytest.approx(0.5 * math.pi, abs=0.015)
    statistic = stats.kstest(data.X[:, 0], 'uniform', args=(-math.pi, 2 * math.pi)).statistic
    assert statistic < 0.01


def test_generators_are_pure_functions_of_the_seed():
    np.testing.assert_array_equal(sample_abs(50, seed=9).X, sample_abs(50, seed=9).X)
    assert not np.array_equal(sample_abs(50, seed=9).X, sample_abs(50, seed=10).X)
    a = sample_ball_indicator(40, 3, 2.0, seed=4)
    b = sample_ball_indicator(40, 3, 2.0, seed=4)
    np.testing.assert_array_equal(a.X, b.X)


def test_ball_positive_fraction_in_two_dimensions():
    data = sample_ball_indicator(100_000, 2, 2.0, seed=0, radial_mode=VOLUME_UNIFORM)
    assert data.y.mean() == pytest.approx(0.25, abs=0.01)
    assert np.all(np.linalg.norm(data.X, axis=1) <= 2.0 + 1e-12)
    assert set(np.unique(data.y)) == {0.0, 1.0}


def test_ball_radius_uniform_keeps_high_dimensions_balanced():
    data = sample_ball_indicator(100_000, 100, 2.0, seed=1, radial_mode=RADIUS_UNIFORM)
    assert data.y.mean() == pytest.approx(0.5, abs=0.01)


def test_default_radial_mode():
    assert default_radial_mode(2, 2.0) == VOLUME_UNIFORM
    assert default_radial_mode(100, 2.0) == RADIUS_UNIFORM
    assert default_radial_mode(10, 2.0) == RADIUS_UNIFORM
    assert sample_ball_indicator(10, 100, 2.0, seed=0).metadata['radial_mode'] == RADIUS_UNIFORM
    with pytest.raises(DomainError):
        sample_ball_indicator(10, 2, 1.0, seed=0)
    with pytest.raises(DomainError):
        sample_ball_indicator(10, 2, 2.0, seed=0, radial_mode='shell')


def _tiny_mnist(count=5, seed=0):
    rng = Rng(seed)
    pixels = np.floor(rng.uniform(0.0, 256.0, size=(count, 28, 28))).astype(np.uint8)
    labels = np.arange(count) % 10
    return pixels, labels


@pytest.mark.parametrize('suffix', ['', '.gz'])
def test_mnist_round_trip(tmp_path, suffix):
    pixels, labels = _tiny_mnist()
    images_path = tmp_path / f'images{suffix}'
    labels_path = tmp_path / f'labels{suffix}'
    write_mnist(images_path, labels_path, pixels, labels)
    data = load_mnist(images_path, labels_path, split='test')
    assert data.images.shape == (5, 784)
    np.testing.assert_allclose(data.images, pixels.reshape(5, 784) / 255.0)
    np.testing.assert_array_equal(data.labels, labels)
    assert data.split == 'test'


def test_mnist_paths_finds_standard_names(tmp_path):
    pixels, labels = _tiny_mnist()
    write_mnist(tmp_path / 'train-images-idx3-ubyte.gz', tmp_path / 'train-labels-idx1-ubyte', pixels, labels)
    write_mnist(tmp_path / 't10k-images-idx3-ubyte', tmp_path / 't10k-labels-idx1-ubyte.gz', pixels, labels)
    paths = mnist_paths(tmp_path)
    assert paths['train_images'].name == 'train-images-idx3-ubyte.gz'
    assert paths['test_labels'].name == 't10k-labels-idx1-ubyte.gz'
    with pytest.raises(MissingDataError):
        mnist_paths(tmp_path / 'nowhere')


def test_mnist_bad_magic_names_the_expected_value(tmp_path):
    images_path = tmp_path / 'images'
    images_path.write_bytes(struct.pack('>IIII', 0x801, 1, 28, 28) + bytes(784))
    labels_path = tmp_path / 'labels'
    labels_path.write_bytes(struct.pack('>II', 0x801, 1) + bytes(1))
    with pytest.raises(IdxFormatError, match='0x00000803'):
        load_mnist(images_path, labels_path)


def test_mnist_truncated_and_mismatched_files(tmp_path):
    images_path = tmp_path / 'images.gz'
    with gzip.open(images_path, 'wb') as handle:
        handle.write(struct.pack('>IIII', 0x803, 3, 28, 28) + bytes(784))
    labels_path = tmp_path / 'labels'
    labels_path.write_bytes(struct.pack('>II', 0x801, 3) + bytes(3))
    with pytest.raises(TruncatedFileError):
        load_mnist(images_path, labels_path)

    pixels, _ = _tiny_mnist(count=3)
    write_mnist(tmp_path / 'three', tmp_path / 'unused', pixels, [1, 2, 3])
    labels_path.write_bytes(struct.pack('>II', 0x801, 2) + bytes(2))
    with pytest.raises(CountMismatchError):
        load_mnist(tmp_path / 'three', labels_path)

    with pytest.raises(MissingDataError):
        load_mnist(tmp_path / 'missing', labels_path)


def test_split_is_disjoint_and_deterministic():
    data = sample_abs(100, seed=3)
    parts = split(data, {'train': 60, 'valid': 20, 'test': 20}, seed=5)
    assert [len(parts[name]) for name in ('train', 'valid', 'test')] == [60, 20, 20]
    seen = np.concatenate([parts[name].X[:, 0] for name in ('train', 'valid', 'test')])
    assert len(np.unique(seen)) == 100
    assert parts['valid'].split == 'valid'
    again = split(data, {'train': 60, 'valid': 20, 'test': 20}, seed=5)
    np.testing.assert_array_equal(parts['test'].X, again['test'].X)

    halves = split(data, {'train': 0.5, 'valid': 0.25}, seed=Rng(5))
    assert (len(halves['train']), len(halves['valid'])) == (50, 25)


def test_split_rejects_oversubscription():
    with pytest.raises(SplitError):
        split(sample_abs(10, seed=0), {'train': 8, 'test': 3}, seed=0)
    with pytest.raises(SplitError):
        split(sample_abs(10, seed=0), {'train': -1}, seed=0)


def test_corpus_encoding(tmp_path):
    path = tmp_path / 'train.txt'
    path.write_text('a b a\n', encoding='utf-8')
    corpus = load_corpus(path)
    assert corpus.ids.tolist() == [0, 1, 0, 2]
    assert corpus.vocab.tokens == ['a', 'b', '<eos>', '<unk>']
    assert corpus.vocab.eos_id == 2

    other = tmp_path / 'valid.txt'
    other.write_text('a z\n', encoding='utf-8')
    assert load_corpus(other, vocab=corpus.vocab).ids.tolist() == [0, 3, 2]


def test_corpus_errors(tmp_path):
    empty = tmp_path / 'empty.txt'
    empty.write_text('\n  \n', encoding='utf-8')
    with pytest.raises(CorpusError):
        load_corpus(empty)
    with pytest.raises(MissingDataError):
        load_corpus(tmp_path / 'absent.txt')
    with pytest.raises(CorpusError):
        Vocabulary(['a', 'a'])


def test_corpus_splits_share_the_training_vocabulary(tmp_path):
    (tmp_path / 'train.txt').write_text('x y\ny x\n', encoding='utf-8')
    (tmp_path / 'valid.txt').write_text('x q\n', encoding='utf-8')
    (tmp_path / 'test.txt').write_text('y\n', encoding='utf-8')
    corpora = load_corpus_splits(tmp_path)
    assert corpora['valid'].vocab is corpora['train'].vocab
    assert corpora['valid'].ids.tolist() == [0, corpora['train'].vocab.unk_id, 2]
