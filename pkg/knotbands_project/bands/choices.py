from django.db import models


class KnotClass(models.TextChoices):
    """Классы узлов и зацеплений, реализуемые моделями твистеров"""
    UNKNOT = 'Unknot', 'Unknot'
    UNLINK = 'Unlink', 'Unlink'
    HOPF_LINK = 'HopfLink', 'Hopf link'
    HOPF_CHAIN = 'HopfChain', 'Hopf chain'
    SOLOMON_KNOT = 'SolomonKnot', "Solomon's knot"
    HOPF_LINK_PLUS_UNLINK = 'HopfLinkPlusUnlink', 'Hopf link + unlink'
    UNKNOT_PLUS_UNLINK = 'UnknotPlusUnlink', 'Unknot + unlink'
    DOUBLE_UNLINKS = 'DoubleUnlinks', 'Double unlinks'


class RunMode(models.TextChoices):
    EXACT = 'exact', 'Точные вероятности'
    SAMPLED = 'sampled', 'Выборка по шотам'


class Model(models.TextChoices):
    TWO_BAND = '2band', 'Двухзонная модель'
    FOUR_BAND = '4band', 'Четырёхзонная модель'
    CUSTOM = 'custom', 'Произвольный твистер'


# Отсортированные внедиагональные элементы (i < j) топологической матрицы намоток
WINDING_SIGNATURES = {
    2: {
        KnotClass.HOPF_LINK: (1.0,),
        KnotClass.UNKNOT: (0.5,),
        KnotClass.UNLINK: (0.0,),
    },
    4: {
        KnotClass.UNKNOT: (0.25,) * 6,
        KnotClass.HOPF_CHAIN: (0.0,) + (0.5,) * 5,
        KnotClass.SOLOMON_KNOT: (0.5,) * 6,
        KnotClass.HOPF_LINK_PLUS_UNLINK: (0.0,) * 5 + (1.0,),
        KnotClass.UNKNOT_PLUS_UNLINK: (0.0,) * 5 + (0.5,),
        KnotClass.DOUBLE_UNLINKS: (0.0,) * 6,
        KnotClass.HOPF_LINK: (0.0,) * 2 + (0.5,) * 4,
        KnotClass.UNLINK: (0.0,) * 4 + (0.5,) * 2,
    },
}


def match_winding_signature(entries, n_bands, tolerance=1e-6):
    """Ищет класс по мультимножеству внедиагональных элементов матрицы намоток"""
    signature = tuple(sorted(float(x) for x in entries))
    for label, expected in WINDING_SIGNATURES.get(n_bands, {}).items():
        if len(expected) == len(signature) and all(
                abs(a - b) <= tolerance for a, b in zip(signature, expected)):
            return label
    return None
