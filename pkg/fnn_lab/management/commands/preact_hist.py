from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Histogram of f_GW pre-activations on the |x| validation split'
    experiment = 'preact-hist'

    option_fields = {
        **ExperimentCommand.option_fields,
        'hidden_size': 'preact_hidden_size',
        'bins': 'preact_bins',
    }

    def add_experiment_arguments(self, parser):
        parser.add_argument('--hidden-size', type=int, help='hidden size of the f_GW model (default 100)')
        parser.add_argument('--bins', type=int, help='histogram bins over [-2pi, 2pi]')
