from django.apps import AppConfig


class FnnLabConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fnn_lab'
    verbose_name = 'Fourier neural network lab'
