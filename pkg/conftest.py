import os

import django

os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'gram_grid.settings')
django.setup()
