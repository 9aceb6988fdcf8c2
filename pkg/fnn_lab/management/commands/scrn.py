from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Train SCRN language models with each hidden-layer variant on a text corpus'
    experiment = 'scrn'

    option_fields = {
        **ExperimentCommand.option_fields,
        'epochs': 'scrn_epochs',
        'lr_grid': 'scrn_lr_grid',
        'layers': 'scrn_layers',
        'corpus': 'corpus',
    }

    def add_experiment_arguments(self, parser):
        parser.add_argument('--corpus', help='directory with train.txt, valid.txt and test.txt')
        parser.add_argument('--layers', help='comma-separated layer variants (sigmoid,gw,silvescu,liu)')
