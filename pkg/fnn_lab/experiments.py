"""
Experiment orchestration: แต่ละ run_* รับ RunConfig แล้วเขียน CSV ลง config.out_dir

ทุกฟังก์ชันคืน ExperimentOutcome (ไฟล์ที่เขียน, exit code, ข้อความสรุป, cell สำหรับบันทึกลง DB)
ลำดับแถวใน CSV เป็น (model, n) ตาม config เสมอ
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from django.conf import settings

from . import datasets, fourier, networks, scrn
from .errors import (EXIT_NUMERICAL, EXIT_OK, EXIT_VERIFICATION, DegenerateFitError, DegenerateTableError,
                     FnnLabError, MissingDataError, NumericalAbort)
from .numerics import Rng, chi_square_independence, loglog_fit
from .recording import fingerprint
from .reporting import write_csv
from .training import LossKind, TrainConfig, accuracy, evaluate, tune_lr

logger = logging.getLogger(__name__)


@dataclass
class ExperimentOutcome:
    files: list = field(default_factory=list)
    exit_code: int = EXIT_OK
    summary: list = field(default_factory=list)
    cells: list = field(default_factory=list)


# --- synthetic sweeps ---

def synthetic_splits(config, task):
    """สร้างข้อมูล train/valid/test ของ task ('abs' หรือ 'ball') แล้วแบ่งแบบสุ่มด้วย seed"""
    total = config.train_size + config.valid_size + config.test_size
    if task == 'abs':
        data = datasets.sample_abs(total, config.seed)
    else:
        mode = None if config.radial_mode == 'auto' else config.radial_mode
        data = datasets.sample_ball_indicator(total, config.ball_dim, config.outer_radius, config.seed, mode)
    sizes = {'train': config.train_size, 'valid': config.valid_size, 'test': config.test_size}
    return datasets.split(data, sizes, Rng(config.seed).spawn(1))


def _fit_slope(points):
    points = [(n, e) for n, e in points if e is not None and math.isfinite(e) and e > 0]
    try:
        return loglog_fit(points)
    except DegenerateFitError:
        return None


def run_synth_sweep(config, task):
    """
    Function: run_synth_sweep
    หน้าที่: sweep (model, n) บน task สังเคราะห์
    - ทุก cell จูน lr บน validation แล้ววัด test MSE
    - task abs มีแถวอ้างอิง Fourier series: abs_tail_error(n)/(2π)
    - fit slope ของ log MSE บน log n ต่อ model
    cell ที่พังเขียน error ลงคอลัมน์ error แล้วทำต่อ
    """
    parts = synthetic_splits(config, task)
    train_set, valid_set, test_set = parts['train'], parts['valid'], parts['test']
    d = train_set.d
    radial_mode = train_set.metadata.get('radial_mode', '')
    train_config = TrainConfig(batch_size=config.batch_size, epochs=config.epochs, lr_grid=config.lr_grid,
                               seed=config.seed, loss=LossKind.SQUARED_ERROR)
    outcome = ExperimentOutcome()
    rows, curve_rows, points = [], [], {}
    failed = 0

    for model_name in config.models:
        for n in config.n_values:
            def factory(rng, model_name=model_name, n=n):
                return networks.build_network(model_name, n, d, rng)

            try:
                tuned = tune_lr(factory, train_set, valid_set, train_config)
                test_mse = evaluate(tuned.best_model, test_set, LossKind.SQUARED_ERROR)
            except FnnLabError as exc:
                logger.warning("%s cell %s n=%d failed: %s", task, model_name, n, exc)
                failed += 1
                rows.append((model_name, n, math.nan, None, radial_mode, str(exc)))
                outcome.cells.append({'model': model_name, 'n': n, 'metric_name': 'test_mse',
                                      'metric_value': None, 'error': str(exc)})
                continue
            errors = '; '.join(f"lr={lr}: {exc}" for lr, exc in tuned.failures)
            rows.append((model_name, n, test_mse, tuned.best_lr, radial_mode, errors))
            points.setdefault(model_name, []).append((n, test_mse))
            outcome.cells.append({'model': model_name, 'n': n, 'tuned_lr': tuned.best_lr,
                                  'metric_name': 'test_mse', 'metric_value': test_mse, 'error': errors})
            for m in tuned.best_result.curves:
                curve_rows.append((model_name, n, m.epoch, m.train_metric, m.valid_metric, m.lr, m.seed))
            logger.info("%s %s n=%d lr=%g test mse %.6g", task, model_name, n, tuned.best_lr, test_mse)

    if task == 'abs':
        for n in config.n_values:
            reference = fourier.abs_tail_error(n) / (2.0 * math.pi)
            rows.append(('fourier', n, reference, None, radial_mode, ''))
            points.setdefault('fourier', []).append((n, reference))

    header = ['model', 'n', 'test_mse', 'tuned_lr', 'radial_mode', 'errors']
    if task == 'abs':
        header.remove('radial_mode')
        rows = [row[:4] + row[5:] for row in rows]
    outcome.files.append(write_csv(config, f'{task}_sweep.csv', header, rows))

    slope_rows = []
    for model_name, model_points in points.items():
        fit = _fit_slope(model_points)
        slope_rows.append((model_name, fit.slope if fit else math.nan,
                           fit.intercept if fit else math.nan, len(model_points)))
        if fit:
            outcome.summary.append(f"{model_name}: slope {fit.slope:.4f}")
    outcome.files.append(write_csv(config, f'{task}_slopes.csv', ['model', 'slope', 'intercept', 'points'],
                                   slope_rows))
    outcome.files.append(write_csv(config, f'{task}_curves.csv',
                                   ['model', 'n', 'epoch', 'train_metric', 'valid_metric', 'lr', 'seed'],
                                   curve_rows))
    cell_count = len(config.models) * len(config.n_values)
    if failed == cell_count:
        outcome.exit_code = EXIT_NUMERICAL
        outcome.summary.append("every sweep cell failed")
    return outcome


# --- Fourier checks ---

def run_fourier_verify(config):
    """
    Function: run_fourier_verify
    หน้าที่: ตาราง sandwich/rate ของ |x|, Parseval cross-check และตาราง (R, n, SE) ของ d = 2, 3
    check ใดไม่ผ่าน -> exit code 3
    """
    outcome = ExperimentOutcome()
    checks = []

    lemma1 = fourier.verify_lemma1(range(1, config.lemma1_n_max + 1), config.lemma1_rate_n)
    outcome.files.append(write_csv(
        config, 'lemma1_sandwich.csv', ['n', 'tail_error', 'lower', 'upper', 'within_bounds'],
        [(row.n, row.tail_error, row.lower, row.upper, row.within_bounds) for row in lemma1.rows],
    ))
    outcome.files.append(write_csv(config, 'lemma1_rate.csv', ['n', 'tail_error'], lemma1.rate_points))
    checks.append(('lemma1_sandwich', float(sum(r.within_bounds for r in lemma1.rows)),
                   float(len(lemma1.rows)), lemma1.sandwich_ok))
    checks.append(('lemma1_rate_slope', lemma1.slope, lemma1.expected_slope, lemma1.rate_ok))

    parseval = fourier.parseval_check(config.parseval_n, config.parseval_grid_points)
    outcome.files.append(write_csv(
        config, 'parseval.csv', ['n', 'grid_mse', 'parseval_mse', 'relative_gap', 'ok'],
        [(row.n, row.grid_mse, row.parseval_mse, row.relative_gap, row.ok) for row in parseval],
    ))
    checks.append(('parseval', max(row.relative_gap for row in parseval), 0.01, all(r.ok for r in parseval)))

    lemma2_rows = []
    for d, radii in ((2, config.lemma2_radii_d2), (3, config.lemma2_radii_d3)):
        report = fourier.verify_lemma2(d, radii, max_points=config.max_lattice_points)
        lemma2_rows.extend((d, row.R, row.n_lattice, row.sq_error) for row in report.rows)
        checks.append((f'lemma2_d{d}_slope', report.slope, report.slope_bound, report.passed))
    outcome.files.append(write_csv(config, 'lemma2.csv', ['d', 'R', 'n_lattice', 'sq_error'], lemma2_rows))

    outcome.files.append(write_csv(config, 'fourier_checks.csv', ['check', 'value', 'bound', 'passed'], checks))
    for name, value, bound, passed in checks:
        outcome.summary.append(f"{name}: {value:.6g} (bound {bound:.6g}) {'PASS' if passed else 'FAIL'}")
    if not all(passed for *_, passed in checks):
        outcome.exit_code = EXIT_VERIFICATION
    return outcome


# --- MNIST ---

def mnist_files(config):
    """path ของไฟล์ MNIST 4 ไฟล์จาก flag ที่ระบุตรงๆ หรือจาก --mnist-dir"""
    explicit = {
        'train_images': config.mnist_images, 'train_labels': config.mnist_labels,
        'test_images': config.mnist_test_images, 'test_labels': config.mnist_test_labels,
    }
    paths = datasets.mnist_paths(config.mnist_dir) if config.mnist_dir else {}
    paths.update({key: Path(value) for key, value in explicit.items() if value})
    missing = sorted(set(explicit) - set(paths))
    if missing:
        raise MissingDataError(f"MNIST files not configured: {', '.join(missing)} "
                               "(use --mnist-dir or the individual --mnist-* flags)")
    return paths


def run_mnist(config):
    """
    Function: run_mnist
    หน้าที่: train classifier ของแต่ละ model (hidden size คงที่), วัด test accuracy
    แล้วทดสอบ chi-square ของตาราง (ถูก, ผิด) ทั้งของ model ที่ train เองและของตัวเลขที่ตีพิมพ์
    """
    paths = mnist_files(config)
    full = datasets.load_mnist(paths['train_images'], paths['train_labels'])
    test_set = datasets.load_mnist(paths['test_images'], paths['test_labels'], split='test')
    parts = datasets.split(full, {'train': len(full) - config.mnist_valid_size, 'valid': config.mnist_valid_size},
                           Rng(config.seed).spawn(1))
    train_config = TrainConfig(batch_size=config.batch_size, epochs=config.mnist_epochs,
                               lr_grid=config.mnist_lr_grid, seed=config.seed, loss=LossKind.CROSS_ENTROPY)
    outcome = ExperimentOutcome()
    rows, counts = [], {}

    for model_name in config.models:
        def factory(rng, model_name=model_name):
            return networks.build_classifier(model_name, config.mnist_hidden_size, datasets.IMAGE_PIXELS,
                                             datasets.N_CLASSES, rng)

        try:
            tuned = tune_lr(factory, parts['train'], parts['valid'], train_config)
        except NumericalAbort as exc:
            logger.warning("mnist %s failed: %s", model_name, exc)
            rows.append((model_name, math.nan, None, None, None, str(exc)))
            outcome.cells.append({'model': model_name, 'n': config.mnist_hidden_size,
                                  'metric_name': 'accuracy', 'error': str(exc)})
            continue
        acc = accuracy(tuned.best_model, test_set)
        correct = int(round(acc * len(test_set)))
        counts[model_name] = [correct, len(test_set) - correct]
        rows.append((model_name, acc, tuned.best_lr, correct, len(test_set) - correct, ''))
        outcome.cells.append({'model': model_name, 'n': config.mnist_hidden_size, 'tuned_lr': tuned.best_lr,
                              'metric_name': 'accuracy', 'metric_value': acc})
        outcome.summary.append(f"{model_name}: accuracy {acc:.4f} (lr {tuned.best_lr:g})")

    outcome.files.append(write_csv(
        config, 'mnist_accuracy.csv', ['model', 'accuracy', 'tuned_lr', 'correct', 'incorrect', 'errors'], rows,
    ))

    chi_rows = []
    sources = [('published', settings.FNN_LAB['PUBLISHED_MNIST_COUNTS'])]
    if len(counts) >= 2:
        sources.append(('trained', counts))
    for source, table in sources:
        try:
            result = chi_square_independence([table[name] for name in table])
        except DegenerateTableError as exc:
            logger.warning("chi-square (%s) skipped: %s", source, exc)
            chi_rows.append((source, ','.join(table), math.nan, None, math.nan, None))
            continue
        chi_rows.append((source, ','.join(table), result.statistic, result.dof,
                         result.critical_value, result.exceeds_critical))
        outcome.summary.append(f"chi-square ({source}): {result.statistic:.4f} on {result.dof} dof")
    outcome.files.append(write_csv(
        config, 'mnist_chi_square.csv',
        ['source', 'models', 'statistic', 'dof', 'critical_value_10pct', 'exceeds_critical'], chi_rows,
    ))
    if not counts:
        outcome.exit_code = EXIT_NUMERICAL
    return outcome


# --- pre-activation histogram ---

def preact_fingerprint(config):
    keys = ('seed', 'train_size', 'valid_size', 'test_size', 'epochs', 'batch_size', 'lr_grid',
            'preact_hidden_size')
    payload = {key: getattr(config, key) for key in keys}
    payload.update({'task': 'abs', 'architecture': 'gw'})
    return fingerprint(payload)


def run_preact_hist(config, store=None):
    """
    Function: run_preact_hist
    หน้าที่: histogram ของ pre-activation ของ f_GW (task abs) บน validation split
    ใช้ model ที่เก็บไว้ถ้า fingerprint ตรง ไม่งั้น train ใหม่แล้วเก็บ
    """
    parts = synthetic_splits(config, 'abs')
    key = preact_fingerprint(config)
    blob = store.get(key) if store is not None else None
    if blob is not None:
        model = networks.load_network(blob)
        logger.info("reusing stored gw model %s", key[:12])
    else:
        train_config = TrainConfig(batch_size=config.batch_size, epochs=config.epochs, lr_grid=config.lr_grid,
                                   seed=config.seed, loss=LossKind.SQUARED_ERROR)
        tuned = tune_lr(lambda rng: networks.build_network('gw', config.preact_hidden_size, 1, rng),
                        parts['train'], parts['valid'], train_config)
        model = tuned.best_model
        if store is not None:
            store.put(key, 'gw', networks.dump_network(model),
                      f"gw n={config.preact_hidden_size} abs lr={tuned.best_lr:g}")

    limit = settings.FNN_LAB['PREACT_RANGE']
    probe = networks.preactivation_probe(model, parts['valid'].inputs, bins=config.preact_bins, limit=limit)
    rows = [('underflow', -math.inf, -limit, probe.underflow)]
    rows.extend(('bin', float(lo), float(hi), int(c))
                for lo, hi, c in zip(probe.edges[:-1], probe.edges[1:], probe.counts))
    rows.append(('overflow', limit, math.inf, probe.overflow))

    outcome = ExperimentOutcome()
    outcome.files.append(write_csv(config, 'preact_hist.csv', ['kind', 'low', 'high', 'count'], rows))
    published_fraction = settings.FNN_LAB['PUBLISHED_PREACT_FRACTION']
    outcome.files.append(write_csv(
        config, 'preact_summary.csv', ['total', 'out_of_range_fraction', 'reference_fraction'],
        [(probe.total, probe.out_of_range_fraction, published_fraction)],
    ))
    outcome.summary.append(f"|z| > pi/2 fraction {probe.out_of_range_fraction:.4f} "
                           f"(reference {published_fraction:g})")
    return outcome


# --- SCRN ---

def scrn_grid(config):
    return list(itertools.product(config.scrn_lr_grid, config.scrn_lr_decay_grid, config.scrn_init_scale_grid))


def tune_scrn(corpora, config, layer, d_h, d_s):
    """
    ลองทุก (lr, decay, init_scale) เลือกตัวที่ validation PPL ต่ำสุด (เสมอกันเลือก lr เล็กกว่า)
    แล้ว train ตัวที่ชนะซ้ำพร้อมวัด test PPL ทุก epoch
    """
    vocab_size = len(corpora['train'].vocab)
    root = Rng(config.seed)
    best = None
    for index, (lr, decay, init_scale) in enumerate(scrn_grid(config)):
        scrn_config = scrn.ScrnConfig(d_h=d_h, d_s=d_s, layer=layer, alpha=config.scrn_alpha,
                                      bptt_window=config.scrn_bptt_window, epochs=config.scrn_epochs,
                                      lr=lr, lr_decay=decay, init_scale=init_scale, seed=config.seed)
        params = scrn.initialize_scrn(vocab_size, d_s, d_h, layer, root.spawn(index),
                                      init_scale=init_scale, alpha=config.scrn_alpha)
        try:
            result = scrn.train_lm(corpora['train'], params, scrn_config, valid=corpora['valid'])
        except NumericalAbort as exc:
            logger.warning("scrn %s lr=%g decay=%g init=%g failed: %s", layer, lr, decay, init_scale, exc)
            continue
        if best is None or (result.best_valid_ppl, lr) < (best[0], best[1].lr):
            best = (result.best_valid_ppl, scrn_config, index)
    if best is None:
        raise NumericalAbort(f"every SCRN setting failed for layer {layer}", layer=layer)

    _, scrn_config, index = best
    params = scrn.initialize_scrn(vocab_size, d_s, d_h, layer, root.spawn(index),
                                  init_scale=scrn_config.init_scale, alpha=config.scrn_alpha)
    result = scrn.train_lm(corpora['train'], params, scrn_config, valid=corpora['valid'], test=corpora['test'])
    return scrn_config, result


def run_scrn(config):
    """
    Function: run_scrn
    หน้าที่: train SCRN ทุก layer variant ในทุกขนาด (d_h, d_s) บน toy corpus
    เขียน PPL ของ train/valid/test ทุก epoch และตารางสรุป
    """
    if not config.corpus:
        raise MissingDataError("no corpus directory configured (use --corpus)")
    corpora = datasets.load_corpus_splits(config.corpus)
    outcome = ExperimentOutcome()
    epoch_rows, summary_rows = [], []
    failed = 0

    for d_h, d_s in config.scrn_sizes:
        for layer in config.scrn_layers:
            try:
                scrn_config, result = tune_scrn(corpora, config, layer, d_h, d_s)
            except NumericalAbort as exc:
                failed += 1
                summary_rows.append((layer, d_h, d_s, None, None, None, math.nan, math.nan, str(exc)))
                outcome.cells.append({'model': layer, 'n': d_h, 'metric_name': 'test_ppl', 'error': str(exc)})
                continue
            for row in result.history:
                epoch_rows.append((layer, d_h, d_s, row.epoch, row.lr, row.train_ppl, row.valid_ppl, row.test_ppl))
            test_ppl = scrn.perplexity(result.params, corpora['test'])
            summary_rows.append((layer, d_h, d_s, scrn_config.lr, scrn_config.lr_decay, scrn_config.init_scale,
                                 result.best_valid_ppl, test_ppl, ''))
            outcome.cells.append({'model': layer, 'n': d_h, 'tuned_lr': scrn_config.lr,
                                  'metric_name': 'test_ppl', 'metric_value': test_ppl})
            outcome.summary.append(f"{layer} ({d_h}, {d_s}): valid ppl {result.best_valid_ppl:.3f}, "
                                   f"test ppl {test_ppl:.3f}")

    outcome.files.append(write_csv(
        config, 'scrn_ppl.csv', ['layer', 'd_h', 'd_s', 'epoch', 'lr', 'train_ppl', 'valid_ppl', 'test_ppl'],
        epoch_rows,
    ))
    outcome.files.append(write_csv(
        config, 'scrn_summary.csv',
        ['layer', 'd_h', 'd_s', 'lr', 'lr_decay', 'init_scale', 'valid_ppl', 'test_ppl', 'errors'], summary_rows,
    ))
    if failed == len(config.scrn_sizes) * len(config.scrn_layers):
        outcome.exit_code = EXIT_NUMERICAL
    return outcome


EXPERIMENTS = {
    'synth-abs': lambda config, store=None: run_synth_sweep(config, 'abs'),
    'synth-ball': lambda config, store=None: run_synth_sweep(config, 'ball'),
    'fourier-verify': lambda config, store=None: run_fourier_verify(config),
    'mnist': lambda config, store=None: run_mnist(config),
    'preact-hist': run_preact_hist,
    'scrn': lambda config, store=None: run_scrn(config),
}


def run_experiment(config, store=None):
    logger.info("running %s (preset %s, seed %d)", config.experiment, config.preset, config.seed)
    return EXPERIMENTS[config.experiment](config, store=store)
