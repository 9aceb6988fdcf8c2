from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Hidden-size sweep on the ball-indicator task'
    experiment = 'synth-ball'

    option_fields = {
        **ExperimentCommand.option_fields,
        'ball_dim': 'ball_dim',
        'outer_radius': 'outer_radius',
        'radial_mode': 'radial_mode',
    }

    def add_experiment_arguments(self, parser):
        parser.add_argument('--ball-dim', type=int, help='input dimension d')
        parser.add_argument('--outer-radius', type=float, help='radius of the sampling ball (> 1)')
        parser.add_argument('--radial-mode', choices=('auto', 'volume_uniform', 'radius_uniform'),
                            help='radial sampling law')
