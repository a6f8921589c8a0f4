"""Ядро линейной алгебры для матриц малой размерности (2, 4, 8)."""
import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.optimize import linear_sum_assignment

from .exceptions import (
    ConfigError,
    InvalidDimension,
    NearDefective,
    NonConvergence,
    NotHermitian,
    RankDeficient,
    SortingFailure,
)

logger = logging.getLogger(__name__)

RESIDUAL_TOLERANCE = 1e-10
CONDITION_LIMIT = 1e8
PIVOT_TOLERANCE = 1e-12
HERMITIAN_TOLERANCE = 1e-10


def as_matrix(m):
    """Приводит вход к квадратной комплексной матрице с конечными элементами"""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidDimension('matrix must be square and non-empty', shape=m.shape)
    if not np.all(np.isfinite(m)):
        raise NonConvergence('matrix has non-finite entries', residual=float('inf'))
    return m


@dataclass(frozen=True)
class EigenDecomposition:
    """Собственные значения, правые (столбцы) и левые (строки) собственные векторы"""
    eigenvalues: np.ndarray
    right: np.ndarray
    left: np.ndarray | None = None
    tracking_overlap: float = 1.0

    @property
    def dim(self):
        return len(self.eigenvalues)

    def vector(self, band):
        return self.right[:, band]

    def reordered(self, order):
        order = np.asarray(order)
        left = None if self.left is None else self.left[order, :]
        return EigenDecomposition(self.eigenvalues[order], self.right[:, order], left, self.tracking_overlap)

    def reconstruct(self):
        return self.right @ np.diag(self.eigenvalues) @ np.linalg.inv(self.right)


def _default_order(eigenvalues):
    # lexsort: последний ключ главный
    return np.lexsort((-eigenvalues.real, -np.round(eigenvalues.imag, 9)))


def _tracking_order(previous, right):
    overlaps = np.abs(previous.right.conj().T @ right)
    greedy = np.argmax(overlaps, axis=1)
    if len(set(greedy.tolist())) == len(greedy):
        order = greedy
    else:
        rows, cols = linear_sum_assignment(overlaps, maximize=True)
        order = cols[np.argsort(rows)]
    matched = overlaps[np.arange(len(order)), order]
    return order, float(matched.min())


def eig(m, previous=None, left=False):
    """Спектральное разложение с упорядочиванием зон.

    Без `previous` зоны упорядочены по убыванию Im E (при равенстве по убыванию Re E);
    с `previous` порядок продолжает зоны по максимальному перекрытию векторов.
    """
    m = as_matrix(m)
    try:
        eigenvalues, right = np.linalg.eig(m)
    except np.linalg.LinAlgError as exc:
        raise NonConvergence(f'eigensolver failed: {exc}', residual=float('inf')) from exc

    right = right / np.linalg.norm(right, axis=0)
    scale = max(np.linalg.norm(m), 1.0)
    residual = float(np.max(np.linalg.norm(m @ right - right * eigenvalues, axis=0)))
    if residual > RESIDUAL_TOLERANCE * scale:
        raise NonConvergence('eigenpair residual above tolerance', residual=residual)

    tracking_overlap = 1.0
    if previous is None:
        order = _default_order(eigenvalues)
    else:
        if previous.dim != len(eigenvalues):
            raise InvalidDimension('previous decomposition has another dimension',
                                   expected=previous.dim, got=len(eigenvalues))
        order, tracking_overlap = _tracking_order(previous, right)

    eigenvalues = eigenvalues[order]
    right = right[:, order]
    left_vectors = None
    if left:
        left_vectors = np.linalg.inv(right)
    return EigenDecomposition(eigenvalues, right, left_vectors, tracking_overlap)


def track_bands(matrices, left=False, min_overlap=None):
    """Разложения вдоль последовательности матриц с непрерывным отслеживанием зон"""
    decompositions = []
    previous = None
    for index, m in enumerate(matrices):
        current = eig(m, previous=previous, left=left)
        if min_overlap is not None and current.tracking_overlap < min_overlap:
            raise SortingFailure('band tracking lost continuity',
                                 index=index, overlap=current.tracking_overlap)
        decompositions.append(current)
        previous = current
    return decompositions


def expm(m, t, allow_fallback=True, return_path=False):
    """Возвращает exp(-i m t).

    Основной путь идёт через спектральное разложение; при обусловленности матрицы
    собственных векторов выше 1e8 используется scipy.linalg.expm (Паде со
    scaling-and-squaring).
    """
    m = as_matrix(m)
    if t < 0:
        raise ConfigError('evolution time must be non-negative', t=t)
    if t == 0 or not np.any(m):
        result, path = np.eye(m.shape[0], dtype=np.complex128), 'trivial'
    else:
        eigenvalues, right = np.linalg.eig(m)
        condition = np.linalg.cond(right)
        if np.isfinite(condition) and condition <= CONDITION_LIMIT:
            phases = np.exp(-1j * eigenvalues * t)
            result, path = (right * phases) @ np.linalg.inv(right), 'eig'
        elif allow_fallback:
            result, path = scipy.linalg.expm(-1j * t * m), 'pade'
        else:
            raise NearDefective('eigenvector matrix is ill-conditioned', condition=float(condition))
    logger.debug('expm via %s path (dim=%d, t=%g)', path, m.shape[0], t)
    if return_path:
        return result, path
    return result


def qr_unitary(m, check_columns=None):
    """QR-разложение с вещественной положительной диагональю R"""
    m = as_matrix(m)
    q, r = np.linalg.qr(m)
    diagonal = np.diag(r)
    magnitudes = np.abs(diagonal)
    check = m.shape[1] if check_columns is None else check_columns
    weak = np.flatnonzero(magnitudes[:check] < PIVOT_TOLERANCE)
    if weak.size:
        raise RankDeficient('Householder pivot below tolerance',
                            column=int(weak[0]), pivot=float(magnitudes[weak[0]]))
    phases = np.where(magnitudes > 0, diagonal / np.where(magnitudes > 0, magnitudes, 1.0), 1.0)
    q = q * phases
    r = phases.conj()[:, np.newaxis] * r
    return q, r


def hermitian_max_eig(m):
    """Наибольшее собственное значение эрмитовой матрицы"""
    m = as_matrix(m)
    scale = max(np.linalg.norm(m), 1.0)
    asymmetry = np.linalg.norm(m - m.conj().T)
    if asymmetry > HERMITIAN_TOLERANCE * scale:
        raise NotHermitian('matrix is not Hermitian', asymmetry=float(asymmetry))
    return float(np.linalg.eigvalsh((m + m.conj().T) / 2)[-1])
