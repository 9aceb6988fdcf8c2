import sys
import types

from django.core.management.base import BaseCommand, CommandError

from fnn_lab.errors import EXIT_USAGE, ConfigError, FnnLabError
from fnn_lab.experiments import run_experiment
from fnn_lab.recording import ModelStore, finish_run, start_run
from fnn_lab.runconfig import PRESETS, build_run_config


def _usage_error(parser, message):
    # argparse ปกติจบด้วย 2 แต่ usage error ของเราคือ 1
    if parser.called_from_command_line:
        parser.print_usage(sys.stderr)
        parser.exit(EXIT_USAGE, f"{parser.prog}: error: {message}\n")
    raise CommandError(f"Error: {message}", returncode=EXIT_USAGE)


class ExperimentCommand(BaseCommand):
    """
    Base ของทุก experiment command

    flag ร่วม: --seed --out --preset --models --n --lr-grid --epochs --config
    subclass กำหนด experiment และเพิ่ม flag เฉพาะใน add_experiment_arguments
    flag ที่ไม่ได้ระบุเป็น None จึงไม่ทับค่าจากไฟล์ config/preset
    """
    experiment = None

    # ชื่อ option ของ argparse -> ชื่อ field ใน RunConfig
    option_fields = {
        'seed': 'seed',
        'out': 'out_dir',
        'preset': 'preset',
        'models': 'models',
        'n': 'n_values',
        'lr_grid': 'lr_grid',
        'epochs': 'epochs',
    }

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.error = types.MethodType(_usage_error, parser)
        return parser

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, help='master seed (unsigned 64-bit)')
        parser.add_argument('--out', help='output directory for CSV files')
        parser.add_argument('--preset', choices=PRESETS, help='scale preset')
        parser.add_argument('--models', help='comma-separated architectures (vanilla,gw,silvescu,liu)')
        parser.add_argument('--n', help='comma-separated ascending hidden sizes')
        parser.add_argument('--lr-grid', help='comma-separated learning rates')
        parser.add_argument('--epochs', type=int, help='training epochs')
        parser.add_argument('--config', help='key=value file with run settings')
        self.add_experiment_arguments(parser)

    def add_experiment_arguments(self, parser):
        pass

    def collect_overrides(self, options):
        return {field: options.get(option) for option, field in self.option_fields.items()}

    def handle(self, *args, **options):
        try:
            config = build_run_config(self.experiment, config_file=options.get('config'),
                                      overrides=self.collect_overrides(options))
        except ConfigError as exc:
            raise CommandError(str(exc), returncode=exc.exit_code)

        self.stdout.write(f"Running {self.experiment} (preset {config.preset}, seed {config.seed})...")
        run = start_run(config)
        try:
            outcome = run_experiment(config, store=ModelStore(run))
        except FnnLabError as exc:
            finish_run(run, exc.exit_code, str(exc))
            raise CommandError(str(exc), returncode=exc.exit_code)

        for line in outcome.summary:
            self.stdout.write(f"  {line}")
        for path in outcome.files:
            self.stdout.write(f"  wrote {path}")
        finish_run(run, outcome.exit_code, '\n'.join(outcome.summary), outcome.cells)
        if outcome.exit_code:
            raise CommandError(f"{self.experiment} finished with failed checks", returncode=outcome.exit_code)
        self.stdout.write(self.style.SUCCESS(f"{self.experiment} finished."))
