"""
Django settings for knotbands_project project.
"""

import json
import os
from pathlib import Path

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent


# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = os.environ.get('DJANGO_SECRET_KEY', 'django-insecure-knotbands-local-batch-runs-only')

# SECURITY WARNING: don't run with debug turned on in production!
DEBUG = os.environ.get('DJANGO_DEBUG', '1') == '1'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'bands',  # косы и узлы неэрмитовых зон
]


# Database

DATABASES = {
    'default': {
        'ENGINE': 'django.db.backends.sqlite3',
        'NAME': BASE_DIR / 'db.sqlite3',
    }
}


# Internationalization

LANGUAGE_CODE = 'ru-ru'

TIME_ZONE = 'Europe/Moscow'

USE_I18N = True

USE_TZ = True

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'


# Параметры расчётов; любую можно переопределить переменной окружения KNOTBANDS_<ИМЯ>

def _env(name, default):
    raw = os.environ.get(f'KNOTBANDS_{name}')
    if raw is None:
        return default
    if isinstance(default, Path):
        return Path(raw)
    return json.loads(raw)


KNOTBANDS = {
    name: _env(name, default)
    for name, default in {
        'K_POINTS': 100,
        'EVOLUTION_TIME': 20.0,
        'EVOLUTION_TIME_UNKNOT_UNLINK': 25.0,
        'SHOTS': 40000,
        'SEED': 2024,
        'LAMBDA_SAMPLES': 720,
        'BOUNDARY_TOLERANCE': 1e-9,
        'KAUFFMAN_MAX_CROSSINGS': 24,
        'PHASE_GRID_STEP': 0.02,
        'PHASE_GRID_EXTENT': 4.0,
        'WORKERS': None,
        'OUTPUT_DIR': BASE_DIR / 'runs',
    }.items()
}


# Logging

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {asctime} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'bands': {
            'handlers': ['console'],
            'level': os.environ.get('KNOTBANDS_LOG_LEVEL', 'INFO'),
            'propagate': False,
        },
        'django': {
            'handlers': ['console'],
            'level': 'WARNING',
        },
    },
}
