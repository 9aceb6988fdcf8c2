from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Check the Fourier truncation-error bounds (|x| series and ball indicator in d = 2, 3)'
    experiment = 'fourier-verify'
