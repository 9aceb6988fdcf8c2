from django.contrib import admin
from .models import ExperimentRun, SweepCell, TrainedModel


class SweepCellInline(admin.TabularInline):
    model = SweepCell
    extra = 0
    fields = ('model', 'n', 'tuned_lr', 'metric_name', 'metric_value', 'error')


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = (
        'experiment',
        'preset',
        'seed',
        'status',
        'exit_code',
        'started_at',
        'finished_at'
    )
    list_filter = ('experiment', 'preset', 'status')
    search_fields = ('experiment', 'message', 'output_dir')
    inlines = [SweepCellInline]


@admin.register(SweepCell)
class SweepCellAdmin(admin.ModelAdmin):
    list_display = ('run', 'model', 'n', 'tuned_lr', 'metric_name', 'metric_value')
    list_filter = ('model', 'metric_name')


@admin.register(TrainedModel)
class TrainedModelAdmin(admin.ModelAdmin):
    list_display = ('architecture', 'fingerprint', 'description', 'created_at')
    search_fields = ('fingerprint', 'description')
    exclude = ('blob',)
