#!/usr/bin/env python
"""
จุดเข้าใช้งานของ fnn_lab

    python manage.py migrate                 สร้างตารางบันทึกผลการรัน
    python manage.py fourier_verify --out results/fourier
    python manage.py synth_abs --preset desk --seed 0
"""
import os
import sys


def main():
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "ไม่สามารถ import Django ได้ กรุณาติดตั้งแพ็กเกจใน requirements.txt "
            "แล้ว activate virtual environment ก่อนรัน experiment"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
