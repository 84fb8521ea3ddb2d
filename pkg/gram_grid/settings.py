from pathlib import Path
from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = config('SECRET_KEY', default='django-insecure-gram-grid-local-only')

DEBUG = config('DEBUG', default=False, cast=bool)

ALLOWED_HOSTS = []

# Application definition
INSTALLED_APPS = [
    'zeta_census',
]

# No models, no persistence beyond report files
DATABASES = {}

# Internationalization
USE_I18N = False
USE_TZ = True
TIME_ZONE = 'UTC'

# Cache configuration (local memory; holds certified zero lists per scan window)
CACHES = {
    'default': {
        'BACKEND': 'django.core.cache.backends.locmem.LocMemCache',
        'LOCATION': 'gram-grid-zeros',
    }
}

# Sweep configuration
GRAMGRID_WORKERS = config('GRAMGRID_WORKERS', default=1, cast=int)
GRAMGRID_CHUNK_SIZE = config('GRAMGRID_CHUNK_SIZE', default=256, cast=int)
GRAMGRID_DEVICE = config('GRAMGRID_DEVICE', default='cpu')
GRAMGRID_STRICT = config('GRAMGRID_STRICT', default=False, cast=bool)
GRAMGRID_ZERO_CACHE_TIMEOUT = config('GRAMGRID_ZERO_CACHE_TIMEOUT', default=600, cast=int)

GRAMGRID_LOG_LEVEL = config('GRAMGRID_LOG_LEVEL', default='INFO')

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '%(asctime)s %(levelname)s %(name)s: %(message)s',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        'zeta_census': {
            'handlers': ['console'],
            'level': GRAMGRID_LOG_LEVEL,
        },
    },
}
