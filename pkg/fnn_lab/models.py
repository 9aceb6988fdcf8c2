from django.db import models
from django.utils import timezone


class ExperimentRun(models.Model):
    """
    Model: ExperimentRun
    หน้าที่: บันทึกการรัน experiment หนึ่งครั้ง (หนึ่งแถวต่อการเรียก management command)
    """
    STATUS_RUNNING = 'running'
    STATUS_OK = 'ok'
    STATUS_FAILED = 'failed'
    STATUS_CHOICES = [
        (STATUS_RUNNING, 'Running'),
        (STATUS_OK, 'OK'),
        (STATUS_FAILED, 'Failed'),
    ]

    experiment = models.CharField(max_length=30, db_index=True)  # synth-abs, mnist, ...
    preset = models.CharField(max_length=10)
    seed = models.BigIntegerField(default=0)
    config_json = models.TextField()  # RunConfig เต็มเป็น sorted JSON
    output_dir = models.CharField(max_length=500)
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default=STATUS_RUNNING)
    exit_code = models.IntegerField(null=True, blank=True)
    message = models.TextField(blank=True, default='')
    started_at = models.DateTimeField(default=timezone.now)
    finished_at = models.DateTimeField(null=True, blank=True)

    def save(self, *args, **kwargs):
        # Strip microseconds
        self.started_at = self.started_at.replace(microsecond=0)
        if self.finished_at:
            self.finished_at = self.finished_at.replace(microsecond=0)
        super().save(*args, **kwargs)

    def __str__(self):
        return f"{self.experiment} seed={self.seed} ({self.status})"

    class Meta:
        ordering = ['-started_at', '-id']


class SweepCell(models.Model):
    """
    Model: SweepCell
    หน้าที่: ผลของหนึ่ง cell (model, hidden size) ใน sweep หรือหนึ่งแถวของตาราง MNIST/SCRN
    """
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='cells')
    model = models.CharField(max_length=20)  # vanilla, gw, silvescu, liu หรือ layer ของ SCRN
    n = models.IntegerField(null=True, blank=True)  # hidden size
    tuned_lr = models.FloatField(null=True, blank=True)
    metric_name = models.CharField(max_length=30)  # test_mse, accuracy, test_ppl
    metric_value = models.FloatField(null=True, blank=True)
    error = models.TextField(blank=True, default='')  # ข้อความ error ถ้า cell นี้พัง

    def __str__(self):
        return f"{self.model} n={self.n} {self.metric_name}={self.metric_value}"

    class Meta:
        ordering = ['run', 'model', 'n']


class TrainedModel(models.Model):
    """
    Model: TrainedModel
    หน้าที่: เก็บ network ที่ train แล้ว (tensor container เป็น bytes) ค้นหาด้วย fingerprint ของ config
    """
    fingerprint = models.CharField(max_length=64, unique=True)  # sha256 ของ config ที่ใช้ train
    architecture = models.CharField(max_length=20)
    description = models.CharField(max_length=200, blank=True, default='')
    blob = models.BinaryField()
    run = models.ForeignKey(ExperimentRun, on_delete=models.SET_NULL, null=True, blank=True,
                            related_name='trained_models')
    created_at = models.DateTimeField(default=timezone.now)

    def save(self, *args, **kwargs):
        self.created_at = self.created_at.replace(microsecond=0)
        super().save(*args, **kwargs)

    def __str__(self):
        return f"{self.architecture} {self.fingerprint[:12]}"

    class Meta:
        ordering = ['-created_at']
