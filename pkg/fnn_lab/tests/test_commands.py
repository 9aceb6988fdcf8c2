import io
import math

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from fnn_lab import experiments, fourier
from fnn_lab.datasets import write_mnist
from fnn_lab.models import ExperimentRun, SweepCell, TrainedModel
from fnn_lab.numerics import Rng
from fnn_lab.reporting import read_csv

SMALL_SWEEP = """\
# ขนาดเล็กพอให้ test รันเร็ว
train_size = 200
valid_size = 50
test_size = 50
epochs = 2
batch_size = 50
n_values = 4, 8
models = vanilla, gw
lr_grid = 0.01
"""


@pytest.fixture
def small_config(tmp_path):
    path = tmp_path / 'small.cfg'
    path.write_text(SMALL_SWEEP, encoding='utf-8')
    return path


def _run(name, *args, **options):
    call_command(name, *args, stdout=io.StringIO(), **options)


@pytest.mark.django_db
def test_fourier_verify_passes_and_is_reproducible(lab_settings, tmp_path):
    out = tmp_path / 'fourier'
    _run('fourier_verify', out=str(out))
    first = {path.name: path.read_bytes() for path in out.iterdir()}
    assert set(first) == {'lemma1_sandwich.csv', 'lemma1_rate.csv', 'parseval.csv', 'lemma2.csv',
                          'fourier_checks.csv'}

    provenance, header, rows = read_csv(out / 'fourier_checks.csv')
    assert provenance.startswith('# fnn_lab experiment=fourier-verify seed=0 config={')
    assert header == ['check', 'value', 'bound', 'passed']
    assert all(row[3] == 'true' for row in rows)
    _, _, sandwich = read_csv(out / 'lemma1_sandwich.csv')
    assert len(sandwich) == 100

    _run('fourier_verify', out=str(out))
    assert {path.name: path.read_bytes() for path in out.iterdir()} == first
    runs = ExperimentRun.objects.filter(experiment='fourier-verify')
    assert runs.count() == 2
    assert all(run.status == ExperimentRun.STATUS_OK and run.exit_code == 0 for run in runs)


@pytest.mark.django_db
def test_fourier_verify_failure_exits_with_three(lab_settings, monkeypatch):
    monkeypatch.setattr(fourier.ParsevalRow, 'ok', property(lambda self: False))
    with pytest.raises(CommandError) as excinfo:
        _run('fourier_verify')
    assert excinfo.value.returncode == 3
    run = ExperimentRun.objects.get()
    assert run.status == ExperimentRun.STATUS_FAILED
    assert run.exit_code == 3


@pytest.mark.django_db
def test_synth_abs_sweep_writes_reference_rows(lab_settings, small_config, tmp_path):
    out = tmp_path / 'abs'
    _run('synth_abs', config=str(small_config), out=str(out), seed=7)
    _, header, rows = read_csv(out / 'abs_sweep.csv')
    assert header == ['model', 'n', 'test_mse', 'tuned_lr', 'errors']
    assert [(row[0], row[1]) for row in rows] == [
        ('vanilla', '4'), ('vanilla', '8'), ('gw', '4'), ('gw', '8'), ('fourier', '4'), ('fourier', '8'),
    ]
    assert float(rows[4][2]) == pytest.approx(fourier.abs_tail_error(4) / (2 * math.pi))
    assert all(math.isfinite(float(row[2])) for row in rows)

    _, _, slopes = read_csv(out / 'abs_slopes.csv')
    assert [row[0] for row in slopes] == ['vanilla', 'gw', 'fourier']
    _, _, curves = read_csv(out / 'abs_curves.csv')
    assert len(curves) == 4 * 3

    run = ExperimentRun.objects.get(experiment='synth-abs')
    assert run.seed == 7
    assert SweepCell.objects.filter(run=run).count() == 4


@pytest.mark.django_db
def test_synth_ball_records_the_radial_mode(lab_settings, small_config, tmp_path):
    out = tmp_path / 'ball'
    _run('synth_ball', config=str(small_config), out=str(out), ball_dim=2, outer_radius=2.0, models='vanilla')
    _, header, rows = read_csv(out / 'ball_sweep.csv')
    assert header == ['model', 'n', 'test_mse', 'tuned_lr', 'radial_mode', 'errors']
    assert len(rows) == 2
    assert {row[4] for row in rows} == {'volume_uniform'}


@pytest.mark.django_db
def test_usage_errors_exit_with_one(lab_settings, tmp_path):
    with pytest.raises(CommandError) as excinfo:
        _run('synth_abs', preset='huge')
    assert excinfo.value.returncode == 1

    bad = tmp_path / 'bad.cfg'
    bad.write_text('hidden_units = 4\n', encoding='utf-8')
    with pytest.raises(CommandError) as excinfo:
        _run('synth_abs', config=str(bad))
    assert excinfo.value.returncode == 1

    with pytest.raises(CommandError) as excinfo:
        _run('synth_abs', models='vanilla,rbf')
    assert excinfo.value.returncode == 1


@pytest.mark.django_db
def test_mnist_without_data_exits_with_two(lab_settings, tmp_path):
    with pytest.raises(CommandError) as excinfo:
        _run('mnist', mnist_dir=str(tmp_path / 'nope'))
    assert excinfo.value.returncode == 2
    assert ExperimentRun.objects.get().exit_code == 2


def _write_tiny_mnist(directory, seed=0):
    rng = Rng(seed)
    for prefix, count in (('train', 60), ('t10k', 20)):
        pixels = np.floor(rng.uniform(0.0, 256.0, size=(count, 784))).astype(np.uint8)
        labels = np.arange(count) % 10
        write_mnist(directory / f'{prefix}-images-idx3-ubyte', directory / f'{prefix}-labels-idx1-ubyte.gz',
                    pixels, labels)


@pytest.mark.django_db
def test_mnist_on_a_tiny_idx_set(lab_settings, tmp_path):
    data_dir = tmp_path / 'mnist'
    data_dir.mkdir()
    _write_tiny_mnist(data_dir)
    config = tmp_path / 'mnist.cfg'
    config.write_text('mnist_valid_size = 10\nbatch_size = 20\nmodels = vanilla, liu\n', encoding='utf-8')
    out = tmp_path / 'out'
    _run('mnist', config=str(config), out=str(out), mnist_dir=str(data_dir), epochs=1, lr_grid='0.01',
         hidden_size=8)

    _, header, rows = read_csv(out / 'mnist_accuracy.csv')
    assert header[:2] == ['model', 'accuracy']
    assert [row[0] for row in rows] == ['vanilla', 'liu']
    for row in rows:
        assert 0.0 <= float(row[1]) <= 1.0
        assert int(row[3]) + int(row[4]) == 20

    _, _, chi_rows = read_csv(out / 'mnist_chi_square.csv')
    assert chi_rows[0][0] == 'published'
    assert float(chi_rows[0][2]) == pytest.approx(5.6449, abs=1e-3)
    assert chi_rows[0][5] == 'false'
    assert [row[0] for row in chi_rows] == ['published', 'trained']


@pytest.mark.django_db
def test_preact_hist_reuses_the_stored_model(lab_settings, small_config, tmp_path, monkeypatch):
    out = tmp_path / 'preact'
    _run('preact_hist', config=str(small_config), out=str(out), hidden_size=5, bins=8)
    first = (out / 'preact_hist.csv').read_bytes()
    assert TrainedModel.objects.count() == 1

    _, _, rows = read_csv(out / 'preact_hist.csv')
    assert len(rows) == 8 + 2
    assert (rows[0][0], rows[-1][0]) == ('underflow', 'overflow')
    assert sum(int(row[3]) for row in rows) == 5 * 50

    def no_training(*args, **kwargs):
        raise AssertionError('the stored model should have been reused')

    monkeypatch.setattr(experiments, 'tune_lr', no_training)
    _run('preact_hist', config=str(small_config), out=str(out), hidden_size=5, bins=8)
    assert (out / 'preact_hist.csv').read_bytes() == first
    assert TrainedModel.objects.count() == 1


@pytest.mark.django_db
def test_scrn_on_a_small_corpus(lab_settings, tmp_path):
    corpus = tmp_path / 'corpus'
    corpus.mkdir()
    (corpus / 'train.txt').write_text('a b c\n' * 20, encoding='utf-8')
    (corpus / 'valid.txt').write_text('a b c\n' * 5, encoding='utf-8')
    (corpus / 'test.txt').write_text('a b c\nc b a\n' * 3, encoding='utf-8')
    config = tmp_path / 'scrn.cfg'
    config.write_text('scrn_sizes = 4x2\nscrn_lr_decay_grid = 1\nscrn_init_scale_grid = 0.1\n', encoding='utf-8')
    out = tmp_path / 'out'
    _run('scrn', config=str(config), out=str(out), corpus=str(corpus), layers='sigmoid,liu', epochs=1,
         lr_grid='0.01')

    _, header, rows = read_csv(out / 'scrn_ppl.csv')
    assert header == ['layer', 'd_h', 'd_s', 'epoch', 'lr', 'train_ppl', 'valid_ppl', 'test_ppl']
    assert [(row[0], row[3]) for row in rows] == [('sigmoid', '0'), ('sigmoid', '1'), ('liu', '0'), ('liu', '1')]
    # epoch 0: U = V = 0 -> distribution แบบ uniform บน vocabulary 5 คำ
    assert float(rows[0][5]) == pytest.approx(5.0)
    _, _, summary = read_csv(out / 'scrn_summary.csv')
    assert [row[0] for row in summary] == ['sigmoid', 'liu']
    assert all(math.isfinite(float(row[7])) for row in summary)


@pytest.mark.django_db
def test_scrn_with_a_missing_corpus_exits_with_two(lab_settings, tmp_path):
    with pytest.raises(CommandError) as excinfo:
        _run('scrn', corpus=str(tmp_path / 'absent'))
    assert excinfo.value.returncode == 2
