"""
Django settings for the Fourier neural network lab (fnn_lab).

ค่าตั้งต้นของการทดลองทั้งหมดอยู่ใน FNN_LAB ด้านล่าง
ค่าที่ขึ้นกับเครื่อง (ฐานข้อมูล, secret key, log level) อ่านจาก environment

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.1/ref/settings/
"""

import math
import os
from pathlib import Path

# สร้าง path ภายในโปรเจค เช่น: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# คำเตือนความปลอดภัย: ตั้ง DJANGO_SECRET_KEY เองเมื่อเปิด admin ให้คนอื่นใช้
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'fnn-lab-local-only-key')

DEBUG = os.environ.get('DJANGO_DEBUG', '0') == '1'

ALLOWED_HOSTS = ['*']


# การกำหนด Application ในระบบ
INSTALLED_APPS = [
    'django.contrib.admin',
    'django.contrib.auth',
    'django.contrib.contenttypes',
    'django.contrib.sessions',
    'django.contrib.messages',
    'django.contrib.staticfiles',
    # แอปพลิเคชันของเรา
    'fnn_lab',
]

MIDDLEWARE = [
    'django.middleware.security.SecurityMiddleware',
    'django.contrib.sessions.middleware.SessionMiddleware',
    'django.middleware.common.CommonMiddleware',
    'django.middleware.csrf.CsrfViewMiddleware',
    'django.contrib.auth.middleware.AuthenticationMiddleware',
    'django.contrib.messages.middleware.MessageMiddleware',
]

ROOT_URLCONF = 'config.urls'

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [
                'django.template.context_processors.debug',
                'django.template.context_processors.request',
                'django.contrib.auth.context_processors.auth',
                'django.contrib.messages.context_processors.messages',
            ],
        },
    },
]


# ฐานข้อมูลสำหรับเก็บประวัติการรันและโมเดลที่ train แล้ว
# ค่าเริ่มต้นเป็น SQLite, ตั้ง FNN_LAB_DB_ENGINE=postgresql เพื่อใช้ PostgreSQL (psycopg2)
_DB_ENGINE = os.environ.get('FNN_LAB_DB_ENGINE', 'sqlite').lower()

if _DB_ENGINE in ('postgres', 'postgresql'):
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.postgresql',
            'NAME': os.environ.get('FNN_LAB_DB_NAME', 'fnn_lab'),
            'USER': os.environ.get('FNN_LAB_DB_USER', 'fnn_lab'),
            'PASSWORD': os.environ.get('FNN_LAB_DB_PASSWORD', ''),
            'HOST': os.environ.get('FNN_LAB_DB_HOST', 'localhost'),
            'PORT': os.environ.get('FNN_LAB_DB_PORT', '5432'),
        }
    }
else:
    DATABASES = {
        'default': {
            'ENGINE': 'django.db.backends.sqlite3',
            'NAME': os.environ.get('FNN_LAB_DB_NAME', str(BASE_DIR / 'fnn_lab.sqlite3')),
        }
    }


# การตั้งค่าภาษาและเขตเวลา (Internationalization)
LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'Asia/Bangkok'

USE_I18N = True

USE_TZ = False


STATIC_URL = 'static/'

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Logging: log ทั้งหมดออก stderr เท่านั้น ไฟล์ผลลัพธ์ (CSV) ต้องไม่มี log ปน
LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'lab': {
            'format': '[%(asctime)s] %(levelname)s %(name)s: %(message)s',
            'datefmt': '%d/%b/%Y %H:%M:%S',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'stream': 'ext://sys.stderr',
            'formatter': 'lab',
        },
    },
    'loggers': {
        'fnn_lab': {
            'handlers': ['console'],
            'level': os.environ.get('FNN_LAB_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
    },
}


# ค่าตั้งต้นของการทดลอง (ลำดับความสำคัญ: flag > ไฟล์ --config > ค่าในนี้)
# desk = ขนาดที่รันบนเครื่องเดียวได้, paper = ขนาดเต็มตามตัวเลขที่ตีพิมพ์
FNN_LAB = {
    'DEFAULT_PRESET': 'desk',
    'OUTPUT_DIR': BASE_DIR / 'results',
    # corpus ตั้งต้นของ scrn (train.txt, valid.txt, test.txt)
    'DEFAULT_CORPUS': BASE_DIR / 'data' / 'toy_corpus',
    # จำนวนจุด lattice สูงสุดที่ยอมให้ enumerate (กัน memory ระเบิด)
    'MAX_LATTICE_POINTS': 50_000_000,
    'PRESETS': {
        'desk': {
            'seed': 0,
            'models': ['vanilla', 'gw', 'silvescu', 'liu'],
            'n_values': [25, 50, 100, 200],
            'lr_grid': [0.0003, 0.001, 0.003, 0.01, 0.03],
            'epochs': 20,
            'batch_size': 100,
            'train_size': 50_000,
            'valid_size': 5_000,
            'test_size': 5_000,
            'ball_dim': 10,
            'outer_radius': 2.0,
            'radial_mode': 'auto',
            'mnist_hidden_size': 64,
            'mnist_epochs': 5,
            'mnist_lr_grid': [0.001, 0.003, 0.01],
            'mnist_valid_size': 5_000,
            'scrn_layers': ['sigmoid', 'gw', 'silvescu', 'liu'],
            'scrn_sizes': [[40, 10]],
            'scrn_epochs': 8,
            'scrn_bptt_window': 10,
            'scrn_alpha': 0.95,
            'scrn_lr_grid': [0.003, 0.01, 0.03],
            'scrn_lr_decay_grid': [0.9],
            'scrn_init_scale_grid': [0.1],
            'preact_hidden_size': 100,
            'preact_bins': 64,
            'lemma1_n_max': 100,
            'lemma1_rate_n': [4, 8, 16, 32, 64, 128],
            'parseval_n': [4, 16, 64],
            'parseval_grid_points': 10_000,
            'lemma2_radii_d2': [4, 8, 16, 32],
            'lemma2_radii_d3': [3, 5, 8, 12],
        },
        'paper': {
            'seed': 0,
            'models': ['vanilla', 'gw', 'silvescu', 'liu'],
            'n_values': [100, 200, 300, 400, 500, 600, 700, 800],
            'lr_grid': [0.0003, 0.001, 0.003, 0.01, 0.03],
            'epochs': 20,
            'batch_size': 100,
            'train_size': 500_000,
            'valid_size': 50_000,
            'test_size': 50_000,
            'ball_dim': 100,
            'outer_radius': 2.0,
            'radial_mode': 'auto',
            'mnist_hidden_size': 64,
            'mnist_epochs': 10,
            'mnist_lr_grid': [0.0003, 0.001, 0.003, 0.01, 0.03],
            'mnist_valid_size': 5_000,
            'scrn_layers': ['sigmoid', 'gw', 'silvescu', 'liu'],
            'scrn_sizes': [[40, 10], [90, 10], [100, 40], [300, 40]],
            'scrn_epochs': 20,
            'scrn_bptt_window': 10,
            'scrn_alpha': 0.95,
            'scrn_lr_grid': [0.001, 0.003, 0.01, 0.03],
            'scrn_lr_decay_grid': [0.5, 0.8, 0.9],
            'scrn_init_scale_grid': [0.05, 0.1, 0.2],
            'preact_hidden_size': 100,
            'preact_bins': 64,
            'lemma1_n_max': 100,
            'lemma1_rate_n': [4, 8, 16, 32, 64, 128],
            'parseval_n': [4, 16, 64],
            'parseval_grid_points': 10_000,
            'lemma2_radii_d2': [4, 8, 16, 32],
            'lemma2_radii_d3': [3, 5, 8, 12],
        },
    },
    # ขอบของ histogram pre-activation: [-2π, 2π]
    'PREACT_RANGE': 2 * math.pi,
    # ค่า accuracy MNIST ที่ตีพิมพ์ (×10,000 ภาพทดสอบ) ใช้เทียบ chi-square
    'PUBLISHED_MNIST_COUNTS': {
        'vanilla': [9648, 352],
        'gw': [9695, 305],
        'silvescu': [9659, 341],
        'liu': [9638, 362],
    },
    'PUBLISHED_PREACT_FRACTION': 0.08,
}
