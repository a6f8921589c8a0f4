"""Эмуляция протокола измерений: неунитарная эволюция, блочное вложение, постселекция."""
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import numerics
from .choices import RunMode
from .conf import get_setting
from .exceptions import (
    AllShotsDiscarded,
    ConfigError,
    IncompleteSettings,
    InvalidDimension,
    NonConvergence,
    PSDViolation,
    RankDeficient,
    WeakSelectivity,
)
from .twister import band_decompositions, build_hamiltonian

logger = logging.getLogger(__name__)

PSD_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-8
SELECTIVITY_THRESHOLD = 0.99


def _rx(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=np.complex128)


def _ry(theta):
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


# Поворот перед измерением в z-базисе: x через Ry(−π/2), y через Rx(π/2)
AXIS_ROTATIONS = {
    'x': _ry(-np.pi / 2),
    'y': _rx(np.pi / 2),
    'z': np.eye(2, dtype=np.complex128),
}

AXES = ('x', 'y', 'z')
SECTORS_4BAND = ('A', 'B', 'AB', 'AB0')
SETTINGS = {
    2: AXES,
    4: tuple(f'{sector}:{axis}' for sector in SECTORS_4BAND for axis in AXES),
}


def qubit_axes(setting, n_bands):
    """Оси измерения для каждого системного кубита.

    В секторах A и B поворачивается q3 (q2 задаёт условие), в AB и AB0 поворачивается q2.
    """
    if n_bands == 2:
        if setting not in AXES:
            raise IncompleteSettings('unknown 2-band setting', setting=setting)
        return (setting,)
    if n_bands == 4:
        sector, _, axis = setting.partition(':')
        if sector not in SECTORS_4BAND or axis not in AXES:
            raise IncompleteSettings('unknown 4-band setting', setting=setting)
        if sector in ('A', 'B'):
            return ('z', axis)
        return (axis, 'z')
    raise InvalidDimension('measurement settings exist for 2 and 4 bands only', n_bands=n_bands)


@dataclass(frozen=True)
class EmbeddedUnitary:
    u_matrix: np.ndarray
    scale_u: float

    @property
    def system_dim(self):
        return self.u_matrix.shape[0] // 2

    def postselected_action(self):
        """Блок, действующий на систему при анцилле 0 на входе и выходе"""
        d = self.system_dim
        return self.u_matrix[:d, :d]


@dataclass(frozen=True)
class ShotConfig:
    shots: int = 40000
    seed: int = 2024
    mode: str = RunMode.EXACT

    def __post_init__(self):
        if self.mode not in RunMode.values:
            raise ConfigError('unknown run mode', mode=self.mode)
        if self.mode == RunMode.SAMPLED and self.shots < 1:
            raise ConfigError('sampled mode needs at least one shot', shots=self.shots)

    @property
    def exact(self):
        return self.mode == RunMode.EXACT

    def seed_sequence(self, *spawn_key):
        return np.random.SeedSequence(self.seed % 2 ** 64, spawn_key=tuple(int(x) for x in spawn_key))


@dataclass(frozen=True)
class MeasurementRecord:
    """Постселектированный результат одной схемы.

    counts хранит число шотов (sampled) или вероятности (exact) для битовых строк с анциллой 0;
    анцилла стоит в старшем бите.
    """
    k: float
    band: int
    setting: str
    counts: dict = field(default_factory=dict)
    discarded_fraction: float = 0.0
    rotation_angle: float = 0.0
    mode: str = RunMode.EXACT

    @property
    def retained(self):
        return sum(self.counts.values())

    def probabilities(self):
        total = self.retained
        return {bits: value / total for bits, value in self.counts.items()}

    def probability(self, system_bits):
        """Вероятность строки системных битов (без анциллы) после постселекции"""
        total = self.retained
        return self.counts.get('0' + system_bits, 0) / total if total else 0.0

    def to_dict(self):
        return {
            'k': self.k,
            'band': self.band,
            'setting': self.setting,
            'counts': dict(sorted(self.counts.items())),
            'discarded_fraction': self.discarded_fraction,
            'rotation_angle': self.rotation_angle,
            'mode': str(self.mode),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            k=float(data['k']),
            band=int(data['band']),
            setting=data['setting'],
            counts=dict(data['counts']),
            discarded_fraction=float(data['discarded_fraction']),
            rotation_angle=float(data.get('rotation_angle', 0.0)),
            mode=data.get('mode', RunMode.EXACT),
        )


def nonunitary_evolution(h, t, rotation=0.0):
    """exp(−i e^{iλ} Ĥ t)"""
    return numerics.expm(np.exp(1j * rotation) * numerics.as_matrix(h), t)


def rotation_overlaps(h, t, target, n_samples):
    """Перекрытие |⟨ψ(λ)|φ⟩| для λ = 2πs/n_samples, s = 0…n_samples−1"""
    h = numerics.as_matrix(h)
    target = np.asarray(target, dtype=np.complex128)
    target = target / np.linalg.norm(target)
    angles = 2 * np.pi * np.arange(n_samples) / n_samples
    start = np.zeros(h.shape[0], dtype=np.complex128)
    start[0] = 1.0

    energies, right = np.linalg.eig(h)
    condition = np.linalg.cond(right)
    if np.isfinite(condition) and condition <= numerics.CONDITION_LIMIT:
        weights = np.linalg.solve(right, start)
        exponents = -1j * np.exp(1j * angles)[:, np.newaxis] * energies[np.newaxis, :] * t
        exponents -= exponents.real.max(axis=1, keepdims=True)
        states = (np.exp(exponents) * weights) @ right.T
    else:
        states = np.array([nonunitary_evolution(h, t, angle)[:, 0] for angle in angles])
    norms = np.linalg.norm(states, axis=1)
    overlaps = np.abs(states.conj() @ target) / np.where(norms > 0, norms, 1.0)
    return angles, overlaps


def select_rotation_angle(spec, k, t, band, n_samples=None, target=None):
    """Угол λ, при котором эволюция из |0…0⟩ сильнее всего выделяет зону band"""
    n_samples = get_setting('LAMBDA_SAMPLES') if n_samples is None else n_samples
    if n_samples < 2:
        raise ConfigError('rotation sweep needs at least two samples', n_samples=n_samples)
    if not 0 <= band < spec.n_bands:
        raise InvalidDimension('band index out of range', band=band, n_bands=spec.n_bands)
    h = build_hamiltonian(spec, k)
    if target is None:
        target = numerics.eig(h).vector(band)
    angles, overlaps = rotation_overlaps(h, t, target, n_samples)
    best = float(overlaps.max())
    index = int(np.flatnonzero(overlaps >= best - 1e-12)[0])
    if best < SELECTIVITY_THRESHOLD:
        raise WeakSelectivity('no rotation angle isolates the band', k=k, band=band, overlap=best, t=t)
    logger.debug('k=%.4f band=%d: lambda=%.4f overlap=%.6f', k, band, angles[index], best)
    return float(angles[index])


def block_embed(u_h):
    """Вкладывает неунитарную Û_H в унитарную матрицу на систему и одну анциллу"""
    u_h = numerics.as_matrix(u_h)
    d = u_h.shape[0]
    gram = u_h.conj().T @ u_h
    top = numerics.hermitian_max_eig(gram)
    if top <= 0:
        raise RankDeficient('evolution operator vanishes', pivot=top)
    scale = top ** -0.5

    defect = np.eye(d) - scale ** 2 * gram
    defect = (defect + defect.conj().T) / 2
    weights, vectors = np.linalg.eigh(defect)
    if weights.min() < -PSD_TOLERANCE:
        raise PSDViolation('I - u^2 U^dag U is not positive semidefinite', eigenvalue=float(weights.min()))
    root = (vectors * np.sqrt(np.clip(weights, 0.0, None))) @ vectors.conj().T

    identity = np.eye(d, dtype=np.complex128)
    intermediary = np.block([[scale * u_h, identity], [root, identity]])
    q, _ = numerics.qr_unitary(intermediary, check_columns=d)

    mismatch = np.linalg.norm(q[:d, :d] - scale * u_h)
    if mismatch > PROJECTION_TOLERANCE * max(1.0, np.sqrt(d)):
        raise NonConvergence('postselected block does not reproduce u*U_H', residual=float(mismatch))
    return EmbeddedUnitary(q, float(scale))


def apply_measurement_rotations(u, axes):
    """(I ⊗ A_2 ⊗ … ⊗ A_{M+1})·Û, анцилла не поворачивается"""
    matrix = u.u_matrix if isinstance(u, EmbeddedUnitary) else numerics.as_matrix(u)
    n_qubits = int(round(np.log2(matrix.shape[0])))
    if 2 ** n_qubits != matrix.shape[0] or len(axes) != n_qubits - 1:
        raise InvalidDimension('one rotation per system qubit is required',
                               dim=matrix.shape[0], axes=len(axes))
    rotation = np.eye(2, dtype=np.complex128)
    for axis in axes:
        if axis not in AXIS_ROTATIONS:
            raise IncompleteSettings('unknown measurement axis', axis=axis)
        rotation = np.kron(rotation, AXIS_ROTATIONS[axis])
    return rotation @ matrix


def simulate_measurement(u_rot, cfg, k=0.0, band=0, setting='z', rng=None, rotation_angle=0.0):
    """Вероятности (или шоты) на выходе схемы из |0…0⟩ с постселекцией анциллы в 0"""
    u_rot = numerics.as_matrix(u_rot)
    dim = u_rot.shape[0]
    n_qubits = int(round(np.log2(dim)))
    half = dim // 2
    probabilities = np.abs(u_rot[:, 0]) ** 2
    probabilities = probabilities / probabilities.sum()
    labels = [format(index, f'0{n_qubits}b') for index in range(half)]

    if cfg.exact:
        retained = probabilities[:half].sum()
        if retained <= 1e-15:
            raise AllShotsDiscarded('ancilla never returns to 0', k=k, band=band, setting=setting)
        counts = {bits: float(p / retained) for bits, p in zip(labels, probabilities[:half])}
        discarded = float(probabilities[half:].sum())
    else:
        if rng is None:
            rng = np.random.default_rng(cfg.seed_sequence())
        draws = rng.multinomial(cfg.shots, probabilities)
        kept = draws[:half]
        if kept.sum() == 0:
            raise AllShotsDiscarded('every shot was discarded by postselection',
                                    k=k, band=band, setting=setting, shots=cfg.shots)
        counts = {bits: int(n) for bits, n in zip(labels, kept) if n}
        discarded = float(draws[half:].sum() / cfg.shots)
    return MeasurementRecord(k, band, setting, counts, discarded, rotation_angle, cfg.mode)


def _protocol_job(spec, k_index, k, band, target, t, cfg, n_samples):
    rotation = select_rotation_angle(spec, k, t, band, n_samples=n_samples, target=target)
    embedded = block_embed(nonunitary_evolution(build_hamiltonian(spec, k), t, rotation))
    records = []
    for setting_index, setting in enumerate(SETTINGS[spec.n_bands]):
        rotated = apply_measurement_rotations(embedded, qubit_axes(setting, spec.n_bands))
        rng = np.random.default_rng(cfg.seed_sequence(k_index, band, setting_index))
        records.append(simulate_measurement(
            rotated, cfg, k=float(k), band=band, setting=setting, rng=rng, rotation_angle=rotation))
    return records


def _run_job(arguments):
    return _protocol_job(*arguments)


def run_protocol(spec, k_grid, t, cfg, workers=None, n_samples=None):
    """Все схемы протокола для каждой пары (k, зона) вдоль сетки"""
    if spec.n_bands not in SETTINGS:
        raise InvalidDimension('the protocol is defined for 2 and 4 bands', n_bands=spec.n_bands)
    n_samples = get_setting('LAMBDA_SAMPLES') if n_samples is None else n_samples
    k_grid = [float(k) for k in k_grid]
    decompositions = band_decompositions(spec, k_grid)
    jobs = [
        (spec, k_index, k, band, decompositions[k_index].vector(band), t, cfg, n_samples)
        for k_index, k in enumerate(k_grid)
        for band in range(spec.n_bands)
    ]
    logger.info('protocol: %d k-points x %d bands x %d settings (%s)',
                len(k_grid), spec.n_bands, len(SETTINGS[spec.n_bands]), cfg.mode)

    if workers in (None, 1):
        batches = [_run_job(job) for job in jobs]
    else:
        chunksize = max(1, len(jobs) // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(_run_job, jobs, chunksize=chunksize))
    records = [record for batch in batches for record in batch]
    logger.info('protocol: %d records', len(records))
    return records


def group_records(records):
    """Записи, сгруппированные по (индекс k, зона) в порядке сетки"""
    groups = {}
    k_index = {}
    for record in records:
        index = k_index.setdefault(record.k, len(k_index))
        groups.setdefault((index, record.band), {})[record.setting] = record
    return list(k_index), groups


def write_records(path, records):
    path = Path(path)
    with path.open('w', encoding='utf-8') as stream:
        for record in records:
            stream.write(json.dumps(record.to_dict()) + '\n')
    return path


def read_records(path):
    with Path(path).open(encoding='utf-8') as stream:
        return [MeasurementRecord.from_dict(json.loads(line)) for line in stream if line.strip()]
