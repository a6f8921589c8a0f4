"""Иерархия ошибок приложения bands.

Каждая ошибка принадлежит ровно одному семейству; семейство задаёт код выхода
management-команд.
"""


class KnotBandsError(Exception):
    """Базовая ошибка приложения"""
    exit_code = 1

    def __init__(self, message='', **context):
        super().__init__(message)
        self.message = message
        self.context = context
        for key, value in context.items():
            setattr(self, key, value)

    def __str__(self):
        if not self.context:
            return self.message
        details = ', '.join(f'{key}={value!r}' for key, value in sorted(self.context.items()))
        return f'{self.message} ({details})'


class ConfigError(KnotBandsError):
    exit_code = 2


class NumericsError(KnotBandsError):
    exit_code = 3


class ProtocolError(KnotBandsError):
    exit_code = 4


class ClassificationError(KnotBandsError):
    exit_code = 5


# Конфигурация
class InvalidDimension(ConfigError):
    pass


class IncompleteSettings(ConfigError):
    pass


class WordTooLong(ConfigError):
    pass


class MalformedTable(ConfigError):
    pass


# Численные методы
class NonConvergence(NumericsError):
    pass


class NearDefective(NumericsError):
    pass


class RankDeficient(NumericsError):
    pass


class NotHermitian(NumericsError):
    pass


class PSDViolation(NumericsError):
    pass


class StepTooLarge(NumericsError):
    pass


class SortingFailure(NumericsError):
    pass


class DivisionFailure(NumericsError):
    pass


# Протокол измерений
class WeakSelectivity(ProtocolError):
    pass


class AllShotsDiscarded(ProtocolError):
    pass


class EmptySector(ProtocolError):
    pass


class DegeneratePhase(ProtocolError):
    pass


class PoleHit(ProtocolError):
    pass


class ProjectionDegenerate(ProtocolError):
    pass


class NotAPermutation(ProtocolError):
    pass


class TangentialCrossing(ProtocolError):
    pass


class NonAdjacentCrossing(ProtocolError):
    pass


class WindingNotQuantized(ProtocolError):
    pass


# Классификация
class OnBoundary(ClassificationError):
    pass


class DegeneratePoint(ClassificationError):
    pass


class SpecialLine(ClassificationError):
    pass


class Unclassified(ClassificationError):
    pass
