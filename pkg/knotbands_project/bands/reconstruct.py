"""Восстановление собственных состояний по постселектированным средним."""
import csv
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .choices import RunMode
from .circuit import AXES, AXIS_ROTATIONS, SETTINGS, MeasurementRecord, group_records, qubit_axes
from .exceptions import (
    DegeneratePhase,
    EmptySector,
    IncompleteSettings,
    InvalidDimension,
    ProtocolError,
)

logger = logging.getLogger(__name__)

BALL_SLACK = 1e-6
PHASE_TOLERANCE = 1e-12
SECTOR_TOLERANCE = 1e-10
GAUGE_TOLERANCE = 1e-12


@dataclass(frozen=True)
class BlochAngles2:
    theta: float
    phi: float
    flags: tuple = ()


@dataclass(frozen=True)
class BlochAngles4:
    theta_A: float
    theta_B: float
    theta_AB: float
    phi_A: float
    phi_B: float
    phi_AB: float
    flags: tuple = ()


@dataclass(frozen=True)
class ConditionalExpectations:
    """Условные средние четырёхзонного протокола.

    A, B, AB, AB0 отображают ось в P(0)−P(1) повёрнутого кубита внутри сектора;
    weights хранит вероятность каждого сектора в z-схеме.
    """
    A: dict
    B: dict
    AB: dict
    AB0: dict
    z_AB: float
    weights: dict
    exact: bool = True
    flags: tuple = ()


def canonical_gauge(vector):
    """Нормирует вектор и делает последнюю ненулевую компоненту вещественной и положительной"""
    vector = np.asarray(vector, dtype=np.complex128)
    vector = vector / np.linalg.norm(vector)
    nonzero = np.flatnonzero(np.abs(vector) > GAUGE_TOLERANCE)
    if nonzero.size:
        pivot = vector[nonzero[-1]]
        vector = vector * (abs(pivot) / pivot)
    return vector


@dataclass(frozen=True, eq=False)
class ReconstructedState:
    amplitudes: np.ndarray
    band: int
    k: float

    def __post_init__(self):
        object.__setattr__(self, 'amplitudes', canonical_gauge(self.amplitudes))

    @property
    def dim(self):
        return len(self.amplitudes)


def fidelity(a, b):
    a = a.amplitudes if isinstance(a, ReconstructedState) else np.asarray(a, dtype=np.complex128)
    b = b.amplitudes if isinstance(b, ReconstructedState) else np.asarray(b, dtype=np.complex128)
    return float(abs(np.vdot(a, b)) ** 2 / (np.vdot(a, a).real * np.vdot(b, b).real))


def _by_setting(records, required):
    if isinstance(records, dict):
        mapping = records
    else:
        mapping = {record.setting: record for record in records}
    missing = [setting for setting in required if setting not in mapping]
    if missing:
        raise IncompleteSettings('measurement settings are missing', missing=missing)
    return mapping


def _clamp(value, exact, what):
    if abs(value) <= 1:
        return value
    if exact and abs(value) > 1 + BALL_SLACK:
        raise ProtocolError('expectation outside the Bloch ball', value=value, quantity=what)
    if abs(value) > 1 + BALL_SLACK:
        logger.warning('clamping %s = %.6f to [-1, 1]', what, value)
    return float(np.clip(value, -1.0, 1.0))


def _phase(x, y, name, flags, strict, **context):
    """Фаза из пары (x, y) условных средних: atan2(−y, x)"""
    if x * x + y * y < PHASE_TOLERANCE:
        if strict:
            raise DegeneratePhase(f'{name} is undefined', **context)
        logger.warning('%s undefined at %s, set to 0', name, context)
        flags.append(('DegeneratePhase', name))
        return 0.0
    return float(np.arctan2(-y, x))


def pauli_expectations_2band(records):
    mapping = _by_setting(records, AXES)
    return tuple(mapping[axis].probability('0') - mapping[axis].probability('1') for axis in AXES)


def bloch_angles_2band(sx, sy, sz, strict=False, exact=True):
    norm = float(np.sqrt(sx * sx + sy * sy + sz * sz))
    if norm > 1 + BALL_SLACK:
        if exact:
            raise ProtocolError('Pauli vector outside the Bloch ball', norm=norm)
        logger.warning('Pauli vector norm %.6f exceeds 1', norm)
    theta = float(np.arccos(np.clip(sz, -1.0, 1.0)))
    flags = []
    if sx * sx + sy * sy < PHASE_TOLERANCE:
        if strict:
            raise DegeneratePhase('phi is undefined at the pole', sz=sz)
        logger.warning('phi undefined at the pole (sz=%.6f), set to 0', sz)
        flags.append(('DegeneratePhase', 'phi'))
        phi = 0.0
    else:
        phi = float(np.arctan2(sy, sx))
    return BlochAngles2(theta, phi, tuple(flags))


def reconstruct_2band(angles, band=0, k=0.0):
    amplitudes = np.array([
        np.cos(angles.theta / 2),
        np.sin(angles.theta / 2) * np.exp(1j * angles.phi),
    ])
    return ReconstructedState(amplitudes, band, k)


def conditional_expectations_4band(records, strict=False):
    mapping = _by_setting(records, SETTINGS[4])
    flags = []

    def p(setting, bits):
        return mapping[setting].probability(bits)

    a = {axis: p(f'A:{axis}', '00') - p(f'A:{axis}', '01') for axis in AXES}
    b = {axis: p(f'B:{axis}', '10') - p(f'B:{axis}', '11') for axis in AXES}
    ab = {axis: p(f'AB:{axis}', '01') - p(f'AB:{axis}', '11') for axis in AXES}
    ab0 = {axis: p(f'AB0:{axis}', '00') - p(f'AB0:{axis}', '10') for axis in AXES}
    z_ab = p('AB0:z', '00') + p('AB0:z', '01') - p('AB0:z', '10') - p('AB0:z', '11')
    weights = {
        'A': p('A:z', '00') + p('A:z', '01'),
        'B': p('B:z', '10') + p('B:z', '11'),
        'AB': p('AB:z', '01') + p('AB:z', '11'),
        'AB0': p('AB0:z', '00') + p('AB0:z', '10'),
    }
    sample = next(iter(mapping.values()))
    for sector, weight in weights.items():
        if weight < SECTOR_TOLERANCE:
            if strict:
                raise EmptySector(f'sector {sector} is unpopulated', k=sample.k, band=sample.band)
            logger.warning('sector %s empty at k=%.4f band=%d', sector, sample.k, sample.band)
            flags.append(('EmptySector', sector))
    exact = all(record.mode == RunMode.EXACT for record in mapping.values())
    return ConditionalExpectations(a, b, ab, ab0, float(z_ab), weights, exact, tuple(flags))


def bloch_angles_4band(expectations, strict=False):
    flags = list(expectations.flags)
    empty = {sector for name, sector in expectations.flags if name == 'EmptySector'}
    exact = expectations.exact

    def polar(sector):
        if sector in empty:
            return 0.0
        ratio = getattr(expectations, sector)['z'] / expectations.weights[sector]
        return float(np.arccos(_clamp(ratio, exact, f'cos theta_{sector}')))

    def azimuth(sector):
        if sector in empty:
            return 0.0
        values = getattr(expectations, sector)
        return _phase(values['x'], values['y'], f'phi_{sector}', flags, strict, sector=sector)

    theta_ab = float(np.arccos(_clamp(expectations.z_AB, exact, 'cos theta_AB')))
    return BlochAngles4(
        theta_A=polar('A'),
        theta_B=polar('B'),
        theta_AB=theta_ab,
        phi_A=azimuth('A'),
        phi_B=azimuth('B'),
        phi_AB=azimuth('AB'),
        flags=tuple(flags),
    )


def reconstruct_4band(angles, band=0, k=0.0):
    ca, sa = np.cos(angles.theta_A / 2), np.sin(angles.theta_A / 2)
    cb, sb = np.cos(angles.theta_B / 2), np.sin(angles.theta_B / 2)
    cab, sab = np.cos(angles.theta_AB / 2), np.sin(angles.theta_AB / 2)
    amplitudes = np.array([
        ca * cab * np.exp(1j * (angles.phi_A + angles.phi_AB)),
        sa * cab * np.exp(1j * angles.phi_AB),
        cb * sab * np.exp(1j * angles.phi_B),
        sb * sab,
    ])
    return ReconstructedState(amplitudes, band, k)


def records_from_state(state, k=0.0, band=0):
    """Точные записи всех настроек для заданного системного состояния без анциллы"""
    state = np.asarray(state, dtype=np.complex128)
    state = state / np.linalg.norm(state)
    n_bands = len(state)
    if n_bands not in SETTINGS:
        raise InvalidDimension('states of dimension 2 or 4 only', dim=n_bands)
    n_system = int(round(np.log2(n_bands)))
    records = []
    for setting in SETTINGS[n_bands]:
        rotation = np.eye(1, dtype=np.complex128)
        for axis in qubit_axes(setting, n_bands):
            rotation = np.kron(rotation, AXIS_ROTATIONS[axis])
        probabilities = np.abs(rotation @ state) ** 2
        counts = {'0' + format(i, f'0{n_system}b'): float(p) for i, p in enumerate(probabilities)}
        records.append(MeasurementRecord(k, band, setting, counts, 0.0, 0.0, RunMode.EXACT))
    return records


def reconstruct_records(records, n_bands, k=0.0, band=0, strict=False):
    """Состояние по полному набору записей одной пары (k, зона)"""
    if n_bands == 2:
        mapping = _by_setting(records, AXES)
        exact = all(record.mode == RunMode.EXACT for record in mapping.values())
        angles = bloch_angles_2band(*pauli_expectations_2band(mapping), strict=strict, exact=exact)
        return reconstruct_2band(angles, band, k)
    if n_bands == 4:
        angles = bloch_angles_4band(conditional_expectations_4band(records, strict), strict)
        return reconstruct_4band(angles, band, k)
    raise InvalidDimension('reconstruction exists for 2 and 4 bands only', n_bands=n_bands)


def reconstruct_series(records, n_bands, strict=False):
    """Ряды восстановленных состояний по зонам, упорядоченные по сетке k"""
    k_values, groups = group_records(records)
    series = {band: [] for band in range(n_bands)}
    for (k_index, band), group in sorted(groups.items()):
        series[band].append(reconstruct_records(group, n_bands, k_values[k_index], band, strict))
    logger.info('reconstructed %d states', sum(len(states) for states in series.values()))
    return series


def write_states(path, series):
    """CSV: k, band, затем пары (Re, Im) компонент"""
    path = Path(path)
    states = [state for band in sorted(series) for state in series[band]]
    dim = states[0].dim if states else 0
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        header = ['k', 'band']
        for index in range(dim):
            header += [f're_{index}', f'im_{index}']
        writer.writerow(header)
        for state in states:
            row = [repr(state.k), state.band]
            for amplitude in state.amplitudes:
                row += [repr(float(amplitude.real)), repr(float(amplitude.imag))]
            writer.writerow(row)
    return path


def read_states(path):
    series = {}
    with Path(path).open(newline='', encoding='utf-8') as stream:
        for row in csv.DictReader(stream):
            dim = (len(row) - 2) // 2
            amplitudes = np.array([
                complex(float(row[f're_{i}']), float(row[f'im_{i}'])) for i in range(dim)
            ])
            band = int(row['band'])
            series.setdefault(band, []).append(ReconstructedState(amplitudes, band, float(row['k'])))
    return series
