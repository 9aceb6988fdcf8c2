from ._base import ExperimentCommand


class Command(ExperimentCommand):
    help = 'Train the four architectures on MNIST and compare accuracies with a chi-square test'
    experiment = 'mnist'

    option_fields = {
        **ExperimentCommand.option_fields,
        'epochs': 'mnist_epochs',
        'lr_grid': 'mnist_lr_grid',
        'hidden_size': 'mnist_hidden_size',
        'mnist_dir': 'mnist_dir',
        'mnist_images': 'mnist_images',
        'mnist_labels': 'mnist_labels',
        'mnist_test_images': 'mnist_test_images',
        'mnist_test_labels': 'mnist_test_labels',
    }

    def add_experiment_arguments(self, parser):
        parser.add_argument('--hidden-size', type=int, help='hidden layer size (default 64)')
        parser.add_argument('--mnist-dir', help='directory holding the four standard IDX files (.gz allowed)')
        parser.add_argument('--mnist-images', help='training images IDX file')
        parser.add_argument('--mnist-labels', help='training labels IDX file')
        parser.add_argument('--mnist-test-images', help='test images IDX file')
        parser.add_argument('--mnist-test-labels', help='test labels IDX file')
