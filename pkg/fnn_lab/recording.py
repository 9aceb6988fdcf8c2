"""
บันทึกผลการรันลงฐานข้อมูล (best effort)

ฐานข้อมูลพังแค่ log warning ไม่กระทบไฟล์ผลลัพธ์และ exit code
"""

import hashlib
import json
import logging

from django.db import DatabaseError, transaction
from django.utils import timezone

from .models import ExperimentRun, SweepCell, TrainedModel

logger = logging.getLogger(__name__)


def fingerprint(payload):
    """sha256 ของ payload (dict) ที่ serialize เป็น sorted JSON"""
    text = json.dumps(payload, sort_keys=True, separators=(',', ':'), default=str)
    return hashlib.sha256(text.encode('utf-8')).hexdigest()


def start_run(config):
    try:
        return ExperimentRun.objects.create(
            experiment=config.experiment,
            preset=config.preset,
            seed=config.seed,
            config_json=config.to_json(),
            output_dir=config.out_dir,
        )
    except DatabaseError as exc:
        logger.warning("could not record run start: %s", exc)
        return None


def finish_run(run, exit_code, message='', cells=()):
    """
    Function: finish_run
    หน้าที่: ปิด run ด้วย exit code และบันทึก SweepCell ทั้งหมดใน transaction เดียว
    """
    if run is None:
        return
    try:
        with transaction.atomic():
            SweepCell.objects.bulk_create([SweepCell(run=run, **cell) for cell in cells])
            run.exit_code = exit_code
            run.status = ExperimentRun.STATUS_OK if exit_code == 0 else ExperimentRun.STATUS_FAILED
            run.message = message
            run.finished_at = timezone.now()
            run.save()
    except DatabaseError as exc:
        logger.warning("could not record run %s result: %s", run.pk, exc)


class ModelStore:
    """เก็บ/ค้นหา network ที่ train แล้วด้วย fingerprint"""

    def __init__(self, run=None):
        self.run = run

    def get(self, key):
        try:
            stored = TrainedModel.objects.filter(fingerprint=key).first()
        except DatabaseError as exc:
            logger.warning("model lookup failed: %s", exc)
            return None
        return bytes(stored.blob) if stored else None

    def put(self, key, architecture, blob, description=''):
        try:
            TrainedModel.objects.update_or_create(
                fingerprint=key,
                defaults={
                    'architecture': architecture,
                    'blob': blob,
                    'description': description[:200],
                    'run': self.run,
                },
            )
        except DatabaseError as exc:
            logger.warning("could not store trained model %s: %s", key[:12], exc)
