"""Траектории Λ, числа намотки, перестановка зон, пересечения и косы."""
import csv
import logging
import math
import re
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .exceptions import (
    InvalidDimension,
    NearDefective,
    NonAdjacentCrossing,
    NotAPermutation,
    PoleHit,
    ProjectionDegenerate,
    SpecialLine,
    StepTooLarge,
    TangentialCrossing,
    WindingNotQuantized,
)
from .reconstruct import ReconstructedState
from .twister import band_decompositions, momentum_grid

logger = logging.getLogger(__name__)

POLE_TOLERANCE = 1e-9
PROJECTION_TOLERANCE = 1e-9
COINCIDENCE_TOLERANCE = 1e-10
STEP_LIMIT = np.pi / 2
ON_LEVEL = 1e-9
TANGENT_TOLERANCE = 1e-6
ANGLE_TOLERANCE = 1e-9
ROOT_TOLERANCE = 1e-9
# в шагах сетки, только для выборочного режима
RECROSSING_STEPS = 3
REORDER_STEPS = 3
QUANTIZATION_EXACT = 0.005
QUANTIZATION_SAMPLED = 0.05


@dataclass(frozen=True, eq=False)
class TrajectorySeries:
    """Комплексные траектории Λ_i(k), одна строка на зону"""
    k_grid: np.ndarray
    lambda_values: np.ndarray

    def __post_init__(self):
        k_grid = np.asarray(self.k_grid, dtype=float)
        values = np.atleast_2d(np.asarray(self.lambda_values, dtype=np.complex128))
        if values.shape[1] != len(k_grid):
            raise InvalidDimension('trajectory length differs from the grid',
                                   grid=len(k_grid), values=values.shape[1])
        if len(k_grid) < 2 or np.any(np.diff(k_grid) <= 0):
            raise InvalidDimension('momentum grid must be strictly increasing')
        object.__setattr__(self, 'k_grid', k_grid)
        object.__setattr__(self, 'lambda_values', values)

    @property
    def n_bands(self):
        return self.lambda_values.shape[0]

    @property
    def step(self):
        return float(np.max(np.diff(self.k_grid)))

    def closed(self, permutation):
        """Копия, у которой точка k = 2π взята из k = 0 по перестановке зон"""
        values = self.lambda_values.copy()
        values[:, -1] = values[list(permutation.mapping), 0]
        return TrajectorySeries(self.k_grid, values)


@dataclass(frozen=True, eq=False)
class WindingTrace:
    k_grid: np.ndarray
    values: dict
    chi0: dict
    reference: float | None = None

    @property
    def pairs(self):
        return sorted(self.values)

    @property
    def n_bands(self):
        return max(j for _, j in self.values) + 1

    def final_matrix(self):
        """Симметричная матрица W_ij(2π) с нулевой диагональю"""
        matrix = np.zeros((self.n_bands, self.n_bands))
        for (i, j), series in self.values.items():
            matrix[i, j] = matrix[j, i] = series[-1]
        return matrix


@dataclass(frozen=True)
class Crossing:
    k: float
    pair: tuple
    r: int
    direction: int


@dataclass(frozen=True)
class BraidWord:
    """Слово в образующих Артина: пары (индекс 1…N−1, знак ±1)"""
    generators: tuple = ()
    strand_count: int = 2

    def __post_init__(self):
        generators = tuple((int(i), int(s)) for i, s in self.generators)
        for index, sign in generators:
            if not 1 <= index <= self.strand_count - 1 or sign not in (1, -1):
                raise InvalidDimension('generator outside the braid group',
                                       index=index, sign=sign, strands=self.strand_count)
        object.__setattr__(self, 'generators', generators)

    def __len__(self):
        return len(self.generators)

    def __str__(self):
        return ' '.join(f's{i}' if s > 0 else f's{i}^-1' for i, s in self.generators)

    @classmethod
    def parse(cls, text, strand_count=None):
        generators = []
        for token in text.replace(',', ' ').split():
            match = re.fullmatch(r'(?:s|σ)(\d+)(?:\^\(?(-?\d+)\)?)?', token)
            if match is None:
                raise InvalidDimension('cannot parse braid generator', token=token)
            power = int(match.group(2) or 1)
            generators += [(int(match.group(1)), 1 if power > 0 else -1)] * abs(power)
        if strand_count is None:
            strand_count = max((i for i, _ in generators), default=1) + 1
        return cls(tuple(generators), strand_count)

    def inverse(self):
        return BraidWord(tuple((i, -s) for i, s in reversed(self.generators)), self.strand_count)

    def mirror(self):
        return BraidWord(tuple((i, -s) for i, s in self.generators), self.strand_count)


@dataclass(frozen=True)
class PermutationMatrix:
    """mapping[j] = s: зона j при k = 2π совпадает с зоной s при k = 0"""
    n: int
    mapping: tuple

    def __post_init__(self):
        mapping = tuple(int(s) for s in self.mapping)
        if len(mapping) != self.n or sorted(mapping) != list(range(self.n)):
            raise NotAPermutation('band mapping is not a bijection', mapping=mapping)
        object.__setattr__(self, 'mapping', mapping)

    @property
    def matrix(self):
        matrix = np.zeros((self.n, self.n))
        for j, s in enumerate(self.mapping):
            matrix[s, j] = 1.0
        return matrix

    def cycles(self):
        seen, cycles = set(), []
        for start in range(self.n):
            if start in seen:
                continue
            cycle, current = [], start
            while current not in seen:
                seen.add(current)
                cycle.append(current)
                current = self.mapping[current]
            cycles.append(tuple(cycle))
        return cycles

    @property
    def order(self):
        return math.lcm(*(len(cycle) for cycle in self.cycles()))

    @property
    def is_identity(self):
        return self.mapping == tuple(range(self.n))


@dataclass(frozen=True, eq=False)
class BraidTrace:
    trace: WindingTrace
    shifted: WindingTrace
    crossings: list
    order: tuple
    word: BraidWord
    permutation: PermutationMatrix
    flags: tuple = field(default_factory=tuple)


def _pauli_vector(state):
    a, b = state.amplitudes
    product = np.conj(a) * b
    return 2 * product.real, 2 * product.imag, abs(a) ** 2 - abs(b) ** 2


def lambda_2band(plus_series, minus_series):
    """Λ = p₊p₋/4 из стереографических проекций обеих зон; Λ₊ = Λ, Λ₋ = −Λ"""
    if len(plus_series) != len(minus_series):
        raise InvalidDimension('band series differ in length',
                               plus=len(plus_series), minus=len(minus_series))
    values = []
    for plus, minus in zip(plus_series, minus_series):
        xp, yp, zp = _pauli_vector(plus)
        xm, ym, zm = _pauli_vector(minus)
        if 1 - zp < POLE_TOLERANCE or 1 - zm < POLE_TOLERANCE:
            raise PoleHit('state sits at the stereographic pole', k=plus.k)
        p_plus = (xp + 1j * yp) / (1 - zp) + (xm + 1j * ym) / (1 - zm)
        p_minus = (xp - 1j * yp) / (1 - zp) - (xm - 1j * ym) / (1 - zm)
        values.append(p_plus * p_minus / 4)
    values = np.array(values)
    k_grid = [state.k for state in plus_series]
    return TrajectorySeries(k_grid, np.vstack([values, -values]))


def lambda_4band(series):
    """Λ_i = (X_i + iY_i)/Z_i для одной зоны"""
    values = []
    for state in series:
        psi3, psi4 = state.amplitudes[2], state.amplitudes[3]
        x_plus_iy = 4 * psi3 * np.conj(psi4)
        z = 4 * abs(psi4) ** 2
        if abs(z) < PROJECTION_TOLERANCE:
            raise ProjectionDegenerate('Z expectation vanishes', k=state.k, band=state.band)
        values.append(x_plus_iy / z)
    return np.array(values)


def trajectories_from_series(series):
    """TrajectorySeries по рядам состояний всех зон"""
    bands = sorted(series)
    k_grid = [state.k for state in series[bands[0]]]
    if len(bands) == 2:
        return lambda_2band(series[bands[0]], series[bands[1]])
    if len(bands) == 4:
        return TrajectorySeries(k_grid, np.vstack([lambda_4band(series[b]) for b in bands]))
    raise InvalidDimension('trajectories exist for 2 and 4 bands only', n_bands=len(bands))


def _start_angle(value):
    """arg в [−π, π): отрицательная вещественная ось даёт −π"""
    angle = float(np.angle(value))
    if angle > np.pi - ANGLE_TOLERANCE:
        angle -= 2 * np.pi
    return angle


def winding_trace(traj):
    """Намотки пар i < j по разности Λ_j − Λ_i"""
    k_grid = traj.k_grid
    values, chi0 = {}, {}
    for i, j in combinations(range(traj.n_bands), 2):
        difference = traj.lambda_values[j] - traj.lambda_values[i]
        if np.any(np.abs(difference) < COINCIDENCE_TOLERANCE):
            index = int(np.argmin(np.abs(difference)))
            raise NearDefective('bands coincide on the grid', pair=(i, j), k=float(k_grid[index]))
        steps = np.angle(difference[1:] / difference[:-1])
        if np.any(np.abs(steps) >= STEP_LIMIT):
            index = int(np.argmax(np.abs(steps)))
            raise StepTooLarge('phase step too large, refine the momentum grid',
                               pair=(i, j), k=float(k_grid[index]), step=float(steps[index]))
        values[(i, j)] = np.concatenate([[0.0], np.cumsum(steps)]) / (2 * np.pi)
        chi0[(i, j)] = _start_angle(difference[0])
    return WindingTrace(k_grid, values, chi0)


def default_reference(trace):
    """Плоскость проекции: arg(Λ₊ − Λ₋) при k = 0 для двух зон, π/2 иначе.

    Пара (0, 1) хранит фазу Λ₋ − Λ₊, поэтому для двух зон к ней добавляется π.
    """
    if trace.n_bands == 2:
        return trace.chi0[(0, 1)] + np.pi
    return np.pi / 2


def phase_shift(trace, reference_chi=None):
    """W̃_ij = W_ij − (χ − χ_ij(0))/2π; None оставляет каждую пару в своей плоскости"""
    if reference_chi is None:
        return WindingTrace(trace.k_grid, dict(trace.values), dict(trace.chi0), None)
    values = {
        pair: series - (reference_chi - trace.chi0[pair]) / (2 * np.pi)
        for pair, series in trace.values.items()
    }
    return WindingTrace(trace.k_grid, values, dict(trace.chi0), float(reference_chi))


def permutation_matrix(states_at_0, states_at_2pi):
    if len(states_at_0) != len(states_at_2pi):
        raise InvalidDimension('band counts differ', start=len(states_at_0), end=len(states_at_2pi))

    def vector(state):
        return state.amplitudes if isinstance(state, ReconstructedState) else np.asarray(state)

    start = np.array([vector(s) / np.linalg.norm(vector(s)) for s in states_at_0])
    end = np.array([vector(s) / np.linalg.norm(vector(s)) for s in states_at_2pi])
    overlaps = np.abs(start.conj() @ end.T)
    mapping = tuple(int(s) for s in np.argmax(overlaps, axis=0))
    return PermutationMatrix(len(mapping), mapping)


def winding_matrix(trace, p, exact=True):
    """Топологическая матрица намоток, усреднённая по степеням P и округлённая до 1/(2n)"""
    final = trace.final_matrix()
    n = p.order
    power = np.eye(p.n)
    average = np.zeros_like(final)
    for _ in range(n):
        average += power.T @ final @ power
        power = power @ p.matrix
    average /= n
    quantum = 1 / (2 * n)
    rounded = np.round(average / quantum) * quantum
    deviation = float(np.max(np.abs(average - rounded)))
    limit = QUANTIZATION_EXACT if exact else QUANTIZATION_SAMPLED
    if deviation > limit:
        raise WindingNotQuantized('winding matrix deviates from multiples of 1/(2n)',
                                  deviation=deviation, limit=limit, order=n)
    np.fill_diagonal(rounded, 0.0)
    return rounded + 0.0


def _level_values(series):
    """u = 2(W̃ − 1/4): пересечения при целых u"""
    return 2 * (np.asarray(series, dtype=float) - 0.25)


def _nudge_endpoints(u):
    for index, neighbour in ((0, 1), (-1, -2)):
        level = np.round(u[index])
        if abs(u[index] - level) <= ON_LEVEL:
            direction = np.sign(u[index] - u[neighbour]) if index == -1 else np.sign(u[neighbour] - u[index])
            if direction == 0:
                direction = 1.0
            u[index] = level + 2 * ON_LEVEL * direction


def _flatten_tangents(u, pair, k_grid, strict, flags):
    for m in range(1, len(u) - 1):
        level = np.round(u[m])
        if abs(u[m] - level) > TANGENT_TOLERANCE:
            continue
        before, after = u[m - 1] - level, u[m + 1] - level
        if before * after > 0 and abs(before) > TANGENT_TOLERANCE and abs(after) > TANGENT_TOLERANCE:
            if strict:
                raise TangentialCrossing('trajectory touches a crossing level',
                                         pair=pair, k=float(k_grid[m]))
            logger.warning('tangential touch of level %d for pair %s at k=%.4f', level, pair, k_grid[m])
            flags.append(('TangentialCrossing', pair, float(k_grid[m])))
            u[m] = level + 2 * TANGENT_TOLERANCE * np.sign(before)


def _pair_crossings(u, pair, k_grid):
    events = []
    for m in range(len(u) - 1):
        a, b = u[m], u[m + 1]
        if b > a:
            levels, direction = range(int(np.floor(a)) + 1, int(np.floor(b)) + 1), 1
        elif b < a:
            levels, direction = range(int(np.floor(a)), int(np.floor(b)), -1), -1
        else:
            continue
        for r in levels:
            fraction = (r - a) / (b - a)
            k = k_grid[m] + fraction * (k_grid[m + 1] - k_grid[m])
            events.append(Crossing(float(k), pair, int(r), direction))
    return events


def _merge_recrossings(events, window, flags):
    """Снимает пары «туда и обратно» через один уровень на расстоянии не больше window"""
    kept = []
    for event in events:
        last = kept[-1] if kept else None
        if (last is not None and last.r == event.r and last.direction == -event.direction
                and event.k - last.k <= window):
            kept.pop()
            logger.debug('merged re-crossing of level %d for pair %s at k=%.4f', event.r, event.pair, event.k)
            flags.append(('MergedRecrossing', event.pair, last.k))
        else:
            kept.append(event)
    return kept


def detect_crossings(shifted, permutation=None, strict=False, flags=None, exact=True):
    """Пересечения уровней W̃ = 1/4 + r/2, упорядоченные по k.

    Половинно-открытые интервалы считают каждое пересечение один раз; событие у k = 0,
    повторённое у 2π, остаётся только у 2π. Для выборочных данных (exact=False) шумовые
    повторные пересечения одного уровня в пределах нескольких шагов сетки взаимно снимаются.
    """
    flags = [] if flags is None else flags
    k_grid = shifted.k_grid
    step = float(np.max(np.diff(k_grid)))
    events = []
    for pair in shifted.pairs:
        u = _level_values(shifted.values[pair])
        _nudge_endpoints(u)
        _flatten_tangents(u, pair, k_grid, strict, flags)
        pair_events = _pair_crossings(u, pair, k_grid)
        if not exact:
            pair_events = _merge_recrossings(pair_events, RECROSSING_STEPS * step, flags)
        events.extend(pair_events)
    events.sort(key=lambda event: (event.k, event.pair))

    window = 2 * step
    period = k_grid[-1]
    mapping = permutation.mapping if permutation is not None else tuple(range(shifted.n_bands))
    late = [e for e in events if period - e.k < window]
    kept = []
    for event in events:
        if event.k < window:
            duplicate = any(
                {mapping[a] for a in other.pair} == set(event.pair)
                for other in late
            )
            if duplicate:
                logger.debug('dropping endpoint duplicate %s', event)
                continue
        kept.append(event)
    return kept


def initial_strand_order(traj, reference_chi):
    """Зоны в порядке возрастания Re(e^{−iχ}Λ(0)); равенство решает следующая точка сетки"""
    rotation = np.exp(-1j * reference_chi)
    first = (rotation * traj.lambda_values[:, 0]).real
    second = (rotation * traj.lambda_values[:, 1]).real
    keys = list(zip(np.round(first, 9), second))
    return tuple(sorted(range(traj.n_bands), key=lambda band: keys[band]))


def _is_adjacent(crossing, positions):
    i, j = crossing.pair
    return abs(positions.index(i) - positions.index(j)) == 1


def extract_braid_word(crossings, n_bands, order=None, window=None, slack=0.0):
    """Слово косы по упорядоченным пересечениям.

    Знак образующей (−1)^r · ориентация · (−1)^{δ_{4N}}; ориентация +1, если меньшая по номеру
    зона пары стоит ниже по позиции. События в окне у k = 0 переносятся в конец слова. При
    slack > 0 несмежное пересечение уступает место ближайшему смежному не дальше slack по k.
    """
    if n_bands not in (2, 4):
        logger.warning('generator sign rule is only established for 2 and 4 bands (N=%d)', n_bands)
    positions = list(order) if order is not None else list(range(n_bands))
    parity = -1 if n_bands == 4 else 1
    pending = list(crossings)
    emitted, deferred = [], []
    index = 0
    while index < len(pending):
        crossing = pending[index]
        if not _is_adjacent(crossing, positions):
            candidate = next(
                (later for later in range(index + 1, len(pending))
                 if pending[later].k - crossing.k <= slack and _is_adjacent(pending[later], positions)),
                None,
            )
            if candidate is None:
                raise NonAdjacentCrossing('crossing bands are not adjacent',
                                          pair=crossing.pair, k=crossing.k, positions=tuple(positions))
            logger.debug('reordering crossing %s ahead of %s', pending[candidate], crossing)
            pending.insert(index, pending.pop(candidate))
            crossing = pending[index]
        index += 1
        i, j = crossing.pair
        pi, pj = positions.index(i), positions.index(j)
        orient = 1 if pi < pj else -1
        sign = (-1) ** (crossing.r % 2) * orient * parity
        generator = (min(pi, pj) + 1, sign, crossing.k)
        if window is not None and crossing.k < window:
            deferred.append(generator)
        else:
            emitted.append(generator)
        positions[pi], positions[pj] = positions[pj], positions[pi]
    generators = emitted + deferred

    if window is not None:
        changed = True
        while changed:
            changed = False
            for a in range(len(generators) - 1):
                first, second = generators[a], generators[a + 1]
                if (abs(first[0] - second[0]) >= 2 and abs(first[2] - second[2]) < window / 2
                        and first[0] > second[0]):
                    generators[a], generators[a + 1] = second, first
                    changed = True
    return BraidWord(tuple((index, sign) for index, sign, _ in generators), n_bands)


def free_reduce(word):
    stack = []
    for generator in word.generators:
        if stack and stack[-1][0] == generator[0] and stack[-1][1] == -generator[1]:
            stack.pop()
        else:
            stack.append(generator)
    return BraidWord(tuple(stack), word.strand_count)


def braid_permutation(word):
    """Перестановка позиций: result[p] равен конечной позиции нити, начавшей в позиции p"""
    strands = list(range(word.strand_count))
    for index, _ in word.generators:
        strands[index - 1], strands[index] = strands[index], strands[index - 1]
    result = [0] * word.strand_count
    for position, strand in enumerate(strands):
        result[strand] = position
    return tuple(result)


def trace_braid(traj, permutation, reference_chi=None, strict=False, reduce=False, exact=True):
    """Полный путь от траекторий к слову косы с проверкой перестановки.

    Для выборочных данных траектория замыкается по перестановке зон, повторные пересечения
    снимаются, а почти одновременные пересечения упорядочиваются по смежности нитей.
    """
    flags = []
    if not exact:
        traj = traj.closed(permutation)
    trace = winding_trace(traj)
    if reference_chi is None:
        reference_chi = default_reference(trace)
    shifted = phase_shift(trace, reference_chi)
    crossings = detect_crossings(shifted, permutation, strict=strict, flags=flags, exact=exact)
    order = initial_strand_order(traj, reference_chi)
    window = 2 * traj.step
    slack = 0.0 if exact else REORDER_STEPS * traj.step
    word = extract_braid_word(crossings, traj.n_bands, order, window, slack=slack)

    start = {band: position for position, band in enumerate(order)}
    expected = [0] * traj.n_bands
    for band in range(traj.n_bands):
        expected[start[band]] = start[permutation.mapping[band]]
    if braid_permutation(word) != tuple(expected):
        raise NotAPermutation('braid word permutation disagrees with band permutation',
                              word=str(word), mapping=permutation.mapping)
    if reduce:
        word = free_reduce(word)
    logger.info('braid word: %s (%d crossings)', str(word) or 'empty', len(crossings))
    return BraidTrace(trace, shifted, crossings, order, word, permutation, tuple(flags))


def count_band_swaps_2band(m0, m1, tolerance=1e-12):
    """ν_E: число k ∈ [0, 2π), где E₊² попадает на отрицательную вещественную ось"""
    if abs(m1 + 1) <= tolerance:
        raise SpecialLine('band-swap count diverges at m1 = -1', m0=m0, m1=m1)
    roots = []
    if abs(m1) <= 2 + tolerance and m1 > -1 - m0 ** 2:
        k = float(np.arccos(np.clip(-m1 / 2, -1.0, 1.0)))
        roots += [k, 2 * np.pi - k]
    if (m1 + 1) ** 2 - m0 ** 2 < 0:
        roots.append(0.0)
    if 1 - m1 ** 2 - m0 ** 2 < 0:
        roots.append(np.pi)
    # при |m1| = 2 внутренние корни совпадают с k = 0 или k = π
    distinct = []
    for k in sorted(root % (2 * np.pi) for root in roots):
        if not distinct or k - distinct[-1] > ROOT_TOLERANCE:
            distinct.append(k)
    if len(distinct) > 1 and distinct[0] + 2 * np.pi - distinct[-1] <= ROOT_TOLERANCE:
        distinct.pop()
    return len(distinct)


def eigen_series(spec, k_grid):
    """Ряды собственных векторов по зонам, непрерывно отслеженных вдоль сетки"""
    decompositions = band_decompositions(spec, k_grid)
    return {
        band: [ReconstructedState(d.vector(band), band, float(k)) for d, k in zip(decompositions, k_grid)]
        for band in range(spec.n_bands)
    }


def global_biorthogonal_berry_phase(spec, k_grid=None):
    """γ в единицах π из произведения биортогональных перекрытий вдоль сетки"""
    if spec.n_bands != 2:
        raise InvalidDimension('the band-swap Berry phase is defined for two bands', n_bands=spec.n_bands)
    k_grid = momentum_grid() if k_grid is None else k_grid
    decompositions = band_decompositions(spec, k_grid, left=True, min_overlap=0.5)
    first, last = decompositions[0], decompositions[-1]
    permutation = permutation_matrix(list(first.right.T), list(last.right.T))
    total = 0.0
    for band in range(spec.n_bands):
        product = 1.0 + 0j
        for current, following in zip(decompositions[:-1], decompositions[1:]):
            product *= current.left[band] @ following.right[:, band]
        product *= last.left[band] @ first.right[:, permutation.mapping[band]]
        total += np.angle(product)
    gamma = total / np.pi
    nearest = round(gamma)
    if abs(gamma - nearest) > 0.1:
        logger.warning('Berry phase %.4f is far from an integer', gamma)
    return int(nearest) % 2


def spectral_trajectories(spec, k_grid):
    decompositions = band_decompositions(spec, k_grid)
    values = np.array([d.eigenvalues for d in decompositions]).T
    permutation = permutation_matrix(list(decompositions[0].right.T), list(decompositions[-1].right.T))
    return TrajectorySeries(k_grid, values), permutation


def spectral_winding_matrix(spec, k_points=200):
    """𝒲 по собственным значениям без протокола измерений"""
    traj, permutation = spectral_trajectories(spec, momentum_grid(k_points))
    return winding_matrix(winding_trace(traj), permutation, exact=True)


def write_trajectories(path, traj):
    path = Path(path)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['k', 'band', 're', 'im'])
        for band in range(traj.n_bands):
            for k, value in zip(traj.k_grid, traj.lambda_values[band]):
                writer.writerow([repr(float(k)), band, repr(float(value.real)), repr(float(value.imag))])
    return path


def write_winding(path, trace):
    path = Path(path)
    pairs = trace.pairs
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['k'] + [f'W_{i}_{j}' for i, j in pairs])
        for index, k in enumerate(trace.k_grid):
            writer.writerow([repr(float(k))] + [repr(float(trace.values[p][index])) for p in pairs])
    return path


def _winding_column(name):
    """'W_i_j' → (i, j)"""
    prefix, i, j = name.split('_')
    if prefix != 'W':
        raise ValueError(f'unexpected winding column {name!r}')
    return int(i), int(j)


def read_winding(path):
    with Path(path).open(newline='', encoding='utf-8') as stream:
        rows = list(csv.reader(stream))
    header, body = rows[0], rows[1:]
    pairs = [_winding_column(name) for name in header[1:]]
    k_grid = np.array([float(row[0]) for row in body])
    values = {pair: np.array([float(row[c + 1]) for row in body]) for c, pair in enumerate(pairs)}
    return WindingTrace(k_grid, values, {pair: 0.0 for pair in pairs})


def write_crossings(path, crossings):
    path = Path(path)
    with path.open('w', newline='', encoding='utf-8') as stream:
        writer = csv.writer(stream)
        writer.writerow(['k', 'i', 'j', 'r', 'direction'])
        for crossing in crossings:
            i, j = crossing.pair
            writer.writerow([repr(crossing.k), i, j, crossing.r, crossing.direction])
    return path


def read_crossings(path):
    with Path(path).open(newline='', encoding='utf-8') as stream:
        return [
            Crossing(float(row['k']), (int(row['i']), int(row['j'])), int(row['r']), int(row['direction']))
            for row in csv.DictReader(stream)
        ]


def read_trajectories(path):
    columns = {}
    with Path(path).open(newline='', encoding='utf-8') as stream:
        for row in csv.DictReader(stream):
            columns.setdefault(int(row['band']), []).append(
                (float(row['k']), complex(float(row['re']), float(row['im']))))
    bands = sorted(columns)
    k_grid = [k for k, _ in columns[bands[0]]]
    return TrajectorySeries(k_grid, np.array([[value for _, value in columns[b]] for b in bands]))


def write_braid(path, word, reduced=None):
    """Текстовый файл с полями word, strands и, если задано, reduced"""
    path = Path(path)
    lines = [f'word: {word}', f'strands: {word.strand_count}']
    if reduced is not None:
        lines.append(f'reduced: {reduced}')
    path.write_text('\n'.join(lines) + '\n', encoding='utf-8')
    return path


def read_braid(path, reduced=False):
    fields = {}
    for line in Path(path).read_text(encoding='utf-8').splitlines():
        if ':' in line:
            key, value = line.split(':', 1)
            fields[key.strip()] = value.strip()
    key = 'reduced' if reduced and 'reduced' in fields else 'word'
    return BraidWord.parse(fields[key], int(fields['strands']))
