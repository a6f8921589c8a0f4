"""Гамильтонианы твистеров, их спектры, фазовые области и торические узлы."""
import csv
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from . import numerics
from .choices import KnotClass, match_winding_signature
from .conf import get_setting
from .exceptions import (
    DegeneratePoint,
    InvalidDimension,
    MalformedTable,
    OnBoundary,
    Unclassified,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TwisterSpec:
    """N-зонная модель: коэффициент при Σ и гармоники m_1…m_V"""
    n_bands: int
    m0: complex
    harmonics: tuple = field(default_factory=tuple)

    def __post_init__(self):
        if self.n_bands < 2:
            raise InvalidDimension('twister needs at least two bands', n_bands=self.n_bands)
        if not self.harmonics:
            raise InvalidDimension('twister needs at least one harmonic')
        object.__setattr__(self, 'm0', complex(self.m0))
        object.__setattr__(self, 'harmonics', tuple(complex(m) for m in self.harmonics))

    @classmethod
    def two_band(cls, m0, m1):
        return cls(2, 1j * m0, (m1, 1.0))

    @classmethod
    def four_band(cls, m0, m1):
        return cls(4, 1j * m0, (m1, 1.0))

    @property
    def is_standard(self):
        """Одна из двух моделей с m_2 = 1 и чисто мнимым коэффициентом при Σ"""
        return (
            self.n_bands in (2, 4)
            and len(self.harmonics) == 2
            and self.harmonics[1] == 1
            and self.m0.real == 0
            and self.harmonics[0].imag == 0
        )

    @property
    def parameters(self):
        """Вещественные (m_0, m_1) стандартной модели"""
        return self.m0.imag, self.harmonics[0].real

    def to_dict(self):
        return {
            'n_bands': self.n_bands,
            'm0': [self.m0.real, self.m0.imag],
            'harmonics': [[m.real, m.imag] for m in self.harmonics],
        }

    @classmethod
    def from_dict(cls, data):
        def to_complex(value):
            if isinstance(value, (list, tuple)):
                return complex(value[0], value[1])
            return complex(value)

        return cls(
            int(data['n_bands']),
            to_complex(data['m0']),
            tuple(to_complex(m) for m in data['harmonics']),
        )


@dataclass(frozen=True)
class PhaseRegion:
    label: str
    boundary_values: tuple
    active: tuple

    @property
    def pattern(self):
        return tuple(int(np.sign(v)) if a else 0 for v, a in zip(self.boundary_values, self.active))


@dataclass(frozen=True)
class TorusLinkType:
    components: int
    component_type: tuple


def shift_matrix(n):
    if n < 2:
        raise InvalidDimension('shift matrix needs n >= 2', n=n)
    p = np.arange(n)
    return np.diag(1 - 2 * p / (n - 1)).astype(np.complex128)


def twister_matrix(n, v, k):
    """Единицы на поддиагонали и e^{ivk} в правом верхнем углу"""
    if n < 2 or v < 1:
        raise InvalidDimension('twister matrix needs n >= 2 and v >= 1', n=n, v=v)
    t = np.diag(np.ones(n - 1, dtype=np.complex128), -1)
    t[0, n - 1] = np.exp(1j * v * k)
    return t


def build_hamiltonian(spec, k):
    h = spec.m0 * shift_matrix(spec.n_bands)
    for v, m in enumerate(spec.harmonics, start=1):
        if m:
            h = h + m * twister_matrix(spec.n_bands, v, k)
    return h


def momentum_grid(k_points=None):
    """Равномерная сетка на [0, 2π] с обоими концами"""
    k_points = get_setting('K_POINTS') if k_points is None else k_points
    if k_points < 3:
        raise InvalidDimension('momentum grid needs at least three points', k_points=k_points)
    return np.linspace(0.0, 2 * np.pi, k_points)


def band_decompositions(spec, k_grid, left=False, min_overlap=None):
    """Разложения Ĥ(k) вдоль сетки с непрерывной нумерацией зон"""
    return numerics.track_bands(
        (build_hamiltonian(spec, k) for k in k_grid), left=left, min_overlap=min_overlap)


def analytic_spectrum_2band(m0, m1, k):
    z = np.exp(1j * k)
    e = np.sqrt(z ** 2 * (m1 + 1) + m1 * z * (m1 + 1) - m0 ** 2 + 0j)
    return e, -e


def analytic_spectrum_4band(m0, m1, k):
    z = np.exp(1j * k)
    s = np.sqrt(16 * m0 ** 4 + 81 * z * (m1 + 1) ** 3 * (m1 + z) + 0j)
    return [
        a / 3 * np.sqrt(-5 * m0 ** 2 + b * s + 0j)
        for a in (1, -1)
        for b in (1, -1)
    ]


def pure_twister_eigenvalues(n, v, k):
    if n < 2 or v < 1:
        raise InvalidDimension('pure twister needs n >= 2 and v >= 1', n=n, v=v)
    j = np.arange(n)
    return np.exp(1j * (v * k + 2 * np.pi * j) / n)


def torus_link_components(v, n):
    d = math.gcd(v, n)
    return TorusLinkType(components=d, component_type=(v // d, n // d))


def torus_embedding(n, v, j, k):
    """Точка γ_j(k) на стандартном торе с радиусами 2 и 1"""
    if not 0 <= j < n:
        raise InvalidDimension('strand index out of range', j=j, n=n)
    theta = (v * k + 2 * np.pi * j) / n
    radius = 2 + np.cos(theta)
    return np.array([radius * np.cos(k), radius * np.sin(k), -np.sin(theta)])


# Граничные функции фазовых диаграмм. Окна отсечения задаются маской активности.

def _boundary_terms_2band(m0, m1):
    m0 = np.asarray(m0, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    values = np.array([
        (m1 + 1) ** 2 - m0 ** 2,
        m1 ** 2 - 1 + m0 ** 2,
        1 + m0 ** 2 + m1,
    ])
    ones = np.ones_like(m0 + m1, dtype=bool)
    active = np.array([ones, ones, np.abs(m1) <= 2])
    return values, active


def _boundary_terms_4band(m0, m1):
    m0 = np.asarray(m0, dtype=float)
    m1 = np.asarray(m1, dtype=float)
    q4 = m0 ** 4
    p = m1 + 1
    values = np.array([
        16 * q4 + 81 * p ** 4,
        16 * q4 + 81 * p ** 3 * (1 - m1),
        16 * q4 - 81 * p ** 3,
        q4 - 9 * p ** 4,
        q4 - 9 * p ** 3 * (1 - m1),
        q4 + 9 * p ** 3,
    ])
    ones = np.ones_like(m0 + m1, dtype=bool)
    active = np.array([
        ones,
        ones,
        np.abs(m1) <= 2,
        ones,
        ones,
        (m1 >= -2) & (m1 <= -1),
    ])
    return values, active


BOUNDARY_NAMES = {
    2: ('F1', 'F2', 'F3'),
    4: ('F1', 'F2', 'F3', 'G1', 'G2', 'G3'),
}

_BOUNDARY_TERMS = {2: _boundary_terms_2band, 4: _boundary_terms_4band}

ANCHORS_2BAND = (
    ((0.5338, 0.6), KnotClass.HOPF_LINK),
    ((1.273, 0.6), KnotClass.UNKNOT),
    ((1.8889, 0.6), KnotClass.UNLINK),
)

ANCHORS_4BAND = (
    ((1.5, 1.0), KnotClass.HOPF_CHAIN),
    ((1.5, 0.5), KnotClass.SOLOMON_KNOT),
    ((1.5, -0.08), KnotClass.HOPF_LINK_PLUS_UNLINK),
    ((1.5, -3.0), KnotClass.UNKNOT),
    ((1.5, -0.18), KnotClass.UNKNOT_PLUS_UNLINK),
    ((1.5, -1.0), KnotClass.DOUBLE_UNLINKS),
    ((1.0, -1.5), KnotClass.HOPF_LINK),
    ((1.5, -1.8), KnotClass.UNLINK),
    ((-0.5, -0.4), KnotClass.SOLOMON_KNOT),
    ((2.0, 1.1), KnotClass.HOPF_CHAIN),
    ((-1.0, -1.5), KnotClass.HOPF_LINK),
    ((-0.7, -1.5), KnotClass.UNKNOT),
    ((-2.5, -2.4), KnotClass.UNLINK),
    ((-1.85, 0.25), KnotClass.HOPF_LINK_PLUS_UNLINK),
    ((-1.4, -0.25), KnotClass.UNKNOT_PLUS_UNLINK),
)

ANCHORS = {2: ANCHORS_2BAND, 4: ANCHORS_4BAND}


def boundary_fields(n_bands, m0, m1):
    """Граничные функции и маски активности на массивах параметров"""
    if n_bands not in _BOUNDARY_TERMS:
        raise InvalidDimension('phase diagrams exist for 2 and 4 bands only', n_bands=n_bands)
    return _BOUNDARY_TERMS[n_bands](m0, m1)


def boundary_values(n_bands, m0, m1):
    values, active = _BOUNDARY_TERMS[n_bands](m0, m1)
    return tuple(float(v) for v in values), tuple(bool(a) for a in active)


def boundary_values_2band(m0, m1):
    return boundary_values(2, m0, m1)


def boundary_values_4band(m0, m1):
    return boundary_values(4, m0, m1)


def default_evolution_time(label):
    if label == KnotClass.UNKNOT_PLUS_UNLINK:
        return get_setting('EVOLUTION_TIME_UNKNOT_UNLINK')
    return get_setting('EVOLUTION_TIME')


def spectral_class_2band(m0, m1):
    """Класс по числу корней (m1+1)z² + m1(m1+1)z − m0² внутри единичного круга"""
    roots = np.roots([m1 + 1, m1 * (m1 + 1), -m0 ** 2])
    inside = int(np.sum(np.abs(roots) < 1))
    return {2: KnotClass.HOPF_LINK, 1: KnotClass.UNKNOT, 0: KnotClass.UNLINK}[inside]


def spectral_class_4band(m0, m1, k_points=200):
    from .braidtrace import spectral_winding_matrix

    matrix = spectral_winding_matrix(TwisterSpec.four_band(m0, m1), k_points)
    entries = matrix[np.triu_indices(4, 1)]
    label = match_winding_signature(entries, 4, tolerance=1e-3)
    if label is None:
        raise Unclassified('winding matrix matches no known class',
                           m0=m0, m1=m1, entries=[round(float(x), 4) for x in entries])
    return label


_SPECTRAL_CLASSIFIERS = {2: spectral_class_2band, 4: spectral_class_4band}


class RegionGrid:
    """Связные компоненты грубой сетки параметров, разрезанной граничными кривыми"""

    def __init__(self, n_bands, step, extent):
        self.n_bands = n_bands
        self.step = step
        self.extent = extent
        self.count = int(round(2 * extent / step))
        self.centers = -extent + step * (np.arange(self.count) + 0.5)
        m0, m1 = np.meshgrid(self.centers, self.centers, indexing='ij')
        values, active = _BOUNDARY_TERMS[n_bands](m0, m1)
        self.signs = np.where(active, np.sign(values), 0).astype(np.int8)
        self.active = active
        self.components = self._label_components()
        self.labels = {}
        self._assign_anchors()
        self._spectral_labels = {}

    def component_label(self, component, m0, m1):
        """Метка опорной точки компоненты, иначе спектральная классификация (m0, m1)"""
        label = self.labels.get(component) or self._spectral_labels.get(component)
        if label is None:
            label = _SPECTRAL_CLASSIFIERS[self.n_bands](m0, m1)
            self._spectral_labels[component] = label
            logger.debug('component %d labelled %s from the spectrum', component, label)
        return label

    def _label_components(self):
        count = self.count
        index = np.arange(count * count).reshape(count, count)
        rows, cols = [], []
        for axis in (0, 1):
            a = [slice(None), slice(None)]
            b = [slice(None), slice(None)]
            a[axis] = slice(0, count - 1)
            b[axis] = slice(1, count)
            a, b = tuple(a), tuple(b)
            both = self.active[(slice(None),) + a] & self.active[(slice(None),) + b]
            flips = both & (self.signs[(slice(None),) + a] != self.signs[(slice(None),) + b])
            keep = ~np.any(flips, axis=0)
            rows.append(index[a][keep])
            cols.append(index[b][keep])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(count * count, count * count))
        n_components, labels = connected_components(graph, directed=False)
        logger.debug('phase grid %d-band: %d components', self.n_bands, n_components)
        return labels.reshape(count, count)

    def _assign_anchors(self):
        conflicts = set()
        for (m0, m1), label in ANCHORS[self.n_bands]:
            component = self.locate(m0, m1)
            if component is None:
                continue
            known = self.labels.get(component)
            if known is not None and known != label:
                logger.warning('anchors %s and %s share a component', known, label)
                conflicts.add(component)
            self.labels[component] = label
        for component in conflicts:
            self.labels.pop(component, None)

    def cell_of(self, m0, m1):
        i = int(np.floor((m0 + self.extent) / self.step))
        j = int(np.floor((m1 + self.extent) / self.step))
        return i, j

    def locate(self, m0, m1, radius=2):
        """Компонента, в которую можно попасть из точки без пересечения границ"""
        i0, j0 = self.cell_of(m0, m1)
        values, active = _BOUNDARY_TERMS[self.n_bands](m0, m1)
        pattern = np.where(active, np.sign(values), 0)
        candidates = []
        for i in range(i0 - radius, i0 + radius + 1):
            for j in range(j0 - radius, j0 + radius + 1):
                if not (0 <= i < self.count and 0 <= j < self.count):
                    continue
                if np.array_equal(self.signs[:, i, j], pattern):
                    distance = math.hypot(self.centers[i] - m0, self.centers[j] - m1)
                    candidates.append((distance, i, j))
        for _, i, j in sorted(candidates):
            if self._segment_is_clear(m0, m1, self.centers[i], self.centers[j], pattern):
                return int(self.components[i, j])
        return None

    def _segment_is_clear(self, m0, m1, c0, c1, pattern):
        s = np.linspace(0.0, 1.0, 9)
        values, active = _BOUNDARY_TERMS[self.n_bands](m0 + s * (c0 - m0), m1 + s * (c1 - m1))
        signs = np.where(active, np.sign(values), 0)
        return bool(np.all(signs == pattern[:, np.newaxis]))


@lru_cache(maxsize=None)
def _region_grid(n_bands, step, extent):
    return RegionGrid(n_bands, step, extent)


def region_grid(n_bands, step=None, extent=None):
    """Сетка компонент для текущих настроек; кэш по (n_bands, step, extent)"""
    step = get_setting('PHASE_GRID_STEP') if step is None else step
    extent = get_setting('PHASE_GRID_EXTENT') if extent is None else extent
    return _region_grid(n_bands, float(step), float(extent))


def phase_region(n_bands, m0, m1, tolerance=None):
    """Классифицирует точку (m0, m1) по знакам граничных функций и связности области"""
    tolerance = get_setting('BOUNDARY_TOLERANCE') if tolerance is None else tolerance
    if n_bands not in _BOUNDARY_TERMS:
        raise InvalidDimension('phase diagrams exist for 2 and 4 bands only', n_bands=n_bands)
    if abs(m0) <= tolerance and abs(m1 + 1) <= tolerance:
        raise DegeneratePoint('spectrum collapses at (0, -1)', m0=m0, m1=m1)
    values, active = boundary_values(n_bands, m0, m1)
    for name, value, is_active in zip(BOUNDARY_NAMES[n_bands], values, active):
        if is_active and abs(value) <= tolerance:
            raise OnBoundary(f'point lies on boundary {name}', m0=m0, m1=m1, value=value)

    grid = region_grid(n_bands)
    component = grid.locate(m0, m1)
    if component is not None:
        label = grid.component_label(component, m0, m1)
    else:
        label = _SPECTRAL_CLASSIFIERS[n_bands](m0, m1)
    return PhaseRegion(KnotClass(label), values, active)


def phase_region_2band(m0, m1):
    return phase_region(2, m0, m1)


def phase_region_4band(m0, m1):
    return phase_region(4, m0, m1)


def write_spectrum(path, k_grid, eigenvalues):
    """CSV: k, band, re, im; eigenvalues имеет форму (число k, число зон)"""
    path = Path(path)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['k', 'band', 're', 'im'])
        for k, row in zip(k_grid, eigenvalues):
            for band, value in enumerate(row):
                writer.writerow([repr(float(k)), band, repr(float(value.real)), repr(float(value.imag))])
    return path


def read_spectrum(path):
    rows = {}
    with Path(path).open(newline='', encoding='utf-8') as stream:
        for row in csv.DictReader(stream):
            rows.setdefault(float(row['k']), {})[int(row['band'])] = complex(
                float(row['re']), float(row['im']))
    k_grid = np.array(list(rows))
    eigenvalues = np.array([[bands[b] for b in sorted(bands)] for bands in rows.values()])
    return k_grid, eigenvalues


def write_torus(path, n, v, samples=400):
    """CSV: k, j, x, y, z вдоль всех нитей чистого твистера"""
    path = Path(path)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['k', 'j', 'x', 'y', 'z'])
        for j in range(n):
            for k in np.linspace(0.0, 2 * np.pi, samples):
                x, y, z = torus_embedding(n, v, j, k)
                writer.writerow([repr(float(k)), j, repr(float(x)), repr(float(y)), repr(float(z))])
    return path


def write_phase_raster(path, m0_values, m1_values, labels):
    """CSV: m0, m1, label; метки идут по m0 во внешнем цикле"""
    path = Path(path)
    labels = iter(labels)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['m0', 'm1', 'label'])
        for m0 in m0_values:
            for m1 in m1_values:
                writer.writerow([repr(float(m0)), repr(float(m1)), next(labels)])
    return path


def read_phase_raster(path):
    with Path(path).open(newline='', encoding='utf-8') as stream:
        rows = [(float(row['m0']), float(row['m1']), row['label']) for row in csv.DictReader(stream)]
    m0_values = sorted({m0 for m0, _, _ in rows})
    m1_values = sorted({m1 for _, m1, _ in rows})
    if len(rows) != len(m0_values) * len(m1_values):
        raise MalformedTable('phase raster is not a full grid', path=str(path),
                             rows=len(rows), m0=len(m0_values), m1=len(m1_values))
    labels = {(m0, m1): label for m0, m1, label in rows}
    return m0_values, m1_values, [labels[(m0, m1)] for m0 in m0_values for m1 in m1_values]
