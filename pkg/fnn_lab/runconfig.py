"""
RunConfig: ค่าที่ใช้รันหนึ่ง experiment

ลำดับความสำคัญ: flag ของ command > ไฟล์ --config (key=value) > preset ใน settings.FNN_LAB
"""

import dataclasses
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from django.conf import settings

from .datasets import RADIAL_MODES
from .errors import ConfigError
from .networks import ARCHITECTURES
from .scrn import LayerKind

logger = logging.getLogger(__name__)

EXPERIMENTS = ('synth-abs', 'synth-ball', 'fourier-verify', 'mnist', 'scrn', 'preact-hist')
PRESETS = ('desk', 'paper')


@dataclass(frozen=True)
class RunConfig:
    experiment: str
    preset: str
    out_dir: str
    seed: int
    models: tuple
    n_values: tuple
    lr_grid: tuple
    epochs: int
    batch_size: int
    train_size: int
    valid_size: int
    test_size: int
    ball_dim: int
    outer_radius: float
    radial_mode: str
    mnist_hidden_size: int
    mnist_epochs: int
    mnist_lr_grid: tuple
    mnist_valid_size: int
    scrn_layers: tuple
    scrn_sizes: tuple
    scrn_epochs: int
    scrn_bptt_window: int
    scrn_alpha: float
    scrn_lr_grid: tuple
    scrn_lr_decay_grid: tuple
    scrn_init_scale_grid: tuple
    preact_hidden_size: int
    preact_bins: int
    lemma1_n_max: int
    lemma1_rate_n: tuple
    parseval_n: tuple
    parseval_grid_points: int
    lemma2_radii_d2: tuple
    lemma2_radii_d3: tuple
    max_lattice_points: int
    mnist_dir: str = None
    mnist_images: str = None
    mnist_labels: str = None
    mnist_test_images: str = None
    mnist_test_labels: str = None
    corpus: str = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        if self.preset not in PRESETS:
            raise ConfigError(f"unknown preset {self.preset!r}; expected one of {PRESETS}")
        if not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        unknown = [m for m in self.models if m not in ARCHITECTURES]
        if not self.models or unknown:
            raise ConfigError(f"models must be a nonempty subset of {ARCHITECTURES}, got {list(self.models)}")
        for name in ('n_values', 'lemma1_rate_n', 'parseval_n', 'lemma2_radii_d2', 'lemma2_radii_d3'):
            values = getattr(self, name)
            if not values or any(v <= 0 for v in values) or list(values) != sorted(set(values)):
                raise ConfigError(f"{name} must be a nonempty strictly ascending list of positive values")
        for name in ('lr_grid', 'mnist_lr_grid', 'scrn_lr_grid', 'scrn_init_scale_grid'):
            values = getattr(self, name)
            if not values or any(v <= 0 for v in values):
                raise ConfigError(f"{name} must be a nonempty list of positive values")
        if not self.scrn_lr_decay_grid or any(not 0 < v <= 1 for v in self.scrn_lr_decay_grid):
            raise ConfigError("scrn_lr_decay_grid values must lie in (0, 1]")
        for name in ('epochs', 'mnist_epochs', 'scrn_epochs'):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be >= 0")
        for name in ('batch_size', 'train_size', 'valid_size', 'test_size', 'ball_dim', 'mnist_hidden_size',
                     'mnist_valid_size', 'scrn_bptt_window', 'preact_hidden_size', 'preact_bins',
                     'lemma1_n_max', 'parseval_grid_points', 'max_lattice_points'):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if self.outer_radius <= 1:
            raise ConfigError(f"outer_radius must exceed 1, got {self.outer_radius}")
        if self.radial_mode != 'auto' and self.radial_mode not in RADIAL_MODES:
            raise ConfigError(f"radial_mode must be 'auto' or one of {RADIAL_MODES}")
        if not 0 <= self.scrn_alpha < 1:
            raise ConfigError(f"scrn_alpha must lie in [0, 1), got {self.scrn_alpha}")
        try:
            [LayerKind(layer) for layer in self.scrn_layers]
        except ValueError as exc:
            raise ConfigError(f"unknown SCRN layer in {list(self.scrn_layers)}") from exc
        if not self.scrn_sizes or any(len(size) != 2 or min(size) < 1 for size in self.scrn_sizes):
            raise ConfigError("scrn_sizes must be a list of (d_h, d_s) pairs")

    def to_dict(self):
        return {f.name: _plain(getattr(self, f.name)) for f in dataclasses.fields(self)}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))

    @property
    def output_path(self):
        return Path(self.out_dir)


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    return value


# --- parsing ---

INT_LISTS = {'n_values', 'lemma1_rate_n', 'parseval_n'}
FLOAT_LISTS = {'lr_grid', 'mnist_lr_grid', 'scrn_lr_grid', 'scrn_lr_decay_grid', 'scrn_init_scale_grid',
               'lemma2_radii_d2', 'lemma2_radii_d3'}
STR_LISTS = {'models', 'scrn_layers'}
FLOATS = {'outer_radius', 'scrn_alpha'}
STRINGS = {'experiment', 'preset', 'out_dir', 'radial_mode', 'mnist_dir', 'mnist_images', 'mnist_labels',
           'mnist_test_images', 'mnist_test_labels', 'corpus'}


def _split_list(text):
    return [item.strip() for item in str(text).split(',') if item.strip()]


def _parse_size(item):
    # "40x10" หรือ [40, 10]
    if isinstance(item, (list, tuple)):
        return tuple(int(v) for v in item)
    parts = str(item).lower().split('x')
    return tuple(int(v) for v in parts)


def coerce(key, value):
    """แปลงค่า (string จากไฟล์/flag หรือ list จาก settings) ให้เป็นชนิดของ field"""
    try:
        if key in INT_LISTS:
            items = value if isinstance(value, (list, tuple)) else _split_list(value)
            return tuple(int(v) for v in items)
        if key in FLOAT_LISTS:
            items = value if isinstance(value, (list, tuple)) else _split_list(value)
            return tuple(float(v) for v in items)
        if key in STR_LISTS:
            items = value if isinstance(value, (list, tuple)) else _split_list(value)
            return tuple(str(v) for v in items)
        if key == 'scrn_sizes':
            items = value if isinstance(value, (list, tuple)) else _split_list(value)
            return tuple(_parse_size(v) for v in items)
        if key in FLOATS:
            return float(value)
        if key in STRINGS:
            return None if value is None else str(value)
        return int(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for {key}: {value!r}") from exc


def field_names():
    return {f.name for f in dataclasses.fields(RunConfig)}


def read_config_file(path):
    """
    Function: read_config_file
    หน้าที่: อ่านไฟล์ key=value (บรรทัดละคู่, # เป็น comment, list คั่นด้วย comma)
    key ที่ไม่รู้จัก -> ConfigError
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    known = field_names()
    values = {}
    for number, raw in enumerate(path.read_text(encoding='utf-8').splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        if '=' not in line:
            raise ConfigError(f"{path}:{number}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split('=', 1))
        key = key.replace('-', '_')
        if key not in known:
            raise ConfigError(f"{path}:{number}: unknown key {key!r}")
        values[key] = coerce(key, value)
    return values


def preset_defaults(preset):
    lab = settings.FNN_LAB
    if preset not in lab['PRESETS']:
        raise ConfigError(f"unknown preset {preset!r}; expected one of {sorted(lab['PRESETS'])}")
    values = {key: coerce(key, value) for key, value in lab['PRESETS'][preset].items()}
    values['max_lattice_points'] = int(lab['MAX_LATTICE_POINTS'])
    values['out_dir'] = str(lab['OUTPUT_DIR'])
    if lab.get('DEFAULT_CORPUS'):
        values['corpus'] = str(lab['DEFAULT_CORPUS'])
    return values


def build_run_config(experiment, preset=None, config_file=None, overrides=None):
    """
    Function: build_run_config
    หน้าที่: รวมค่า preset -> ไฟล์ -> flag (flag ที่เป็น None ถือว่าไม่ได้ระบุ)
    """
    overrides = {key: value for key, value in (overrides or {}).items() if value is not None}
    file_values = read_config_file(config_file) if config_file else {}
    preset = overrides.get('preset') or file_values.get('preset') or settings.FNN_LAB['DEFAULT_PRESET']
    values = preset_defaults(preset)
    values.update(file_values)
    unknown = set(overrides) - field_names()
    if unknown:
        raise ConfigError(f"unknown settings {sorted(unknown)}")
    values.update({key: coerce(key, value) for key, value in overrides.items()})
    values['experiment'] = experiment
    values['preset'] = preset
    config = RunConfig(**values)
    logger.debug("run config for %s: %s", experiment, config.to_json())
    return config
