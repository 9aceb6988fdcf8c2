from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Hidden-size sweep on the |x| task with the Fourier-series reference rows'
    experiment = 'synth-abs'
