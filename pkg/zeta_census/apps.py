from django.apps import AppConfig

class ZetaCensusConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'zeta_census'
