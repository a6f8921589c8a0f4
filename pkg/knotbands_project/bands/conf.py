from django.conf import settings

DEFAULTS = {
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
    'OUTPUT_DIR': 'runs',
}


def get_setting(name):
    """Значение настройки из settings.KNOTBANDS с откатом на значение по умолчанию"""
    if name not in DEFAULTS:
        raise KeyError(f'unknown knotbands setting: {name}')
    overrides = getattr(settings, 'KNOTBANDS', {}) if settings.configured else {}
    return overrides.get(name, DEFAULTS[name])
