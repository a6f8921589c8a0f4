"""Инварианты замыканий кос: Бурау, Александер, скобка Кауфмана, Джонс."""
import logging
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import permutations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .braidtrace import BraidWord, braid_permutation
from .choices import KnotClass, WINDING_SIGNATURES, match_winding_signature
from .conf import get_setting
from .exceptions import DivisionFailure, InvalidDimension, Unclassified, WordTooLong

logger = logging.getLogger(__name__)


class LaurentPoly:
    """Многочлен Лорана с целыми коэффициентами.

    Для переменной 's' ключ q означает s^{q/4}, для 'A' ключ равен показателю A.
    """

    __slots__ = ('terms', 'variable')

    def __init__(self, terms=None, variable='s'):
        if variable not in ('s', 'A'):
            raise InvalidDimension('unknown polynomial variable', variable=variable)
        self.terms = {int(e): int(c) for e, c in (terms or {}).items() if c}
        self.variable = variable

    @classmethod
    def constant(cls, value, variable='s'):
        return cls({0: value}, variable)

    @classmethod
    def monomial(cls, exponent, coefficient=1, variable='s'):
        """Одночлен; для 's' exponent задаётся в целых степенях s (или Fraction)"""
        key = Fraction(exponent) * 4 if variable == 's' else Fraction(exponent)
        if key.denominator != 1:
            raise InvalidDimension('exponent off the quarter lattice', exponent=exponent)
        return cls({int(key): coefficient}, variable)

    def _check(self, other):
        if isinstance(other, int):
            return LaurentPoly.constant(other, self.variable)
        if other.variable != self.variable:
            raise InvalidDimension('polynomials in different variables',
                                   left=self.variable, right=other.variable)
        return other

    def __add__(self, other):
        other = self._check(other)
        terms = Counter(self.terms)
        terms.update(other.terms)
        return LaurentPoly(terms, self.variable)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly({e: -c for e, c in self.terms.items()}, self.variable)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def __mul__(self, other):
        other = self._check(other)
        terms = Counter()
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                terms[e1 + e2] += c1 * c2
        return LaurentPoly(terms, self.variable)

    __rmul__ = __mul__

    def __pow__(self, power):
        if power < 0:
            if len(self.terms) != 1 or abs(next(iter(self.terms.values()))) != 1:
                raise DivisionFailure('only units can be inverted', poly=str(self))
            (e, c), = self.terms.items()
            return LaurentPoly({-e * -power: c ** -power}, self.variable)
        result = LaurentPoly.constant(1, self.variable)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = LaurentPoly.constant(other, self.variable)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.variable == other.variable and self.terms == other.terms

    def __hash__(self):
        return hash((self.variable, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        return f'LaurentPoly({self})'

    def __str__(self):
        return self.format()

    @property
    def is_zero(self):
        return not self.terms

    def exponent(self, key):
        return Fraction(key, 4) if self.variable == 's' else Fraction(key)

    def shifted(self, key):
        return LaurentPoly({e + key: c for e, c in self.terms.items()}, self.variable)

    def substitute(self):
        """A = s^{−1/4}: переводит многочлен от A в многочлен от s и обратно"""
        target = 's' if self.variable == 'A' else 'A'
        return LaurentPoly({-e: c for e, c in self.terms.items()}, target)

    def canonical(self):
        """Представитель класса ±s^a·p: младшая степень 0, младший коэффициент положителен"""
        if self.is_zero:
            return self
        low = min(self.terms)
        sign = 1 if self.terms[low] > 0 else -1
        return LaurentPoly({e - low: sign * c for e, c in self.terms.items()}, self.variable)

    def equivalent(self, other):
        return self.canonical() == self._check(other).canonical()

    def divide_exact(self, divisor):
        """Точное деление в ℤ[x^{±1}]; DivisionFailure при ненулевом остатке"""
        divisor = self._check(divisor)
        if divisor.is_zero:
            raise DivisionFailure('division by zero polynomial')
        if self.is_zero:
            return self
        remainder = Counter(self.terms)
        d_low = min(divisor.terms)
        d_high = max(divisor.terms)
        lead = divisor.terms[d_high]
        quotient = {}
        while remainder:
            high = max(remainder)
            if high - d_high < min(self.terms) - d_low:
                break
            coefficient, rest = divmod(remainder[high], lead)
            if rest:
                raise DivisionFailure('non-integer quotient coefficient', dividend=str(self), divisor=str(divisor))
            shift = high - d_high
            quotient[shift] = coefficient
            for e, c in divisor.terms.items():
                remainder[e + shift] -= coefficient * c
                if not remainder[e + shift]:
                    del remainder[e + shift]
        if remainder:
            raise DivisionFailure('division leaves a remainder', dividend=str(self), divisor=str(divisor))
        return LaurentPoly(quotient, self.variable)

    def evaluate(self, value):
        value = complex(value)
        return sum(c * value ** float(self.exponent(e)) for e, c in self.terms.items())

    def format(self):
        if self.is_zero:
            return '0'
        keys = sorted(self.terms, reverse=self.variable == 'A')
        parts = []
        for key in keys:
            coefficient = self.terms[key]
            exponent = self.exponent(key)
            sign = '-' if coefficient < 0 else '+'
            magnitude = abs(coefficient)
            if exponent == 0:
                body = str(magnitude)
            else:
                if exponent == 1:
                    power = self.variable
                elif exponent.denominator == 1 and exponent > 0:
                    power = f'{self.variable}^{exponent}'
                else:
                    power = f'{self.variable}^({exponent})'
                body = power if magnitude == 1 else f'{magnitude}{power}'
            parts.append(sign + body)
        text = ''.join(parts)
        return text[1:] if text.startswith('+') else text

    _TERM = re.compile(
        r'([+-])\s*(\d*)\s*\*?\s*(?:([sA])(?:\^(?:\((-?\d+(?:/\d+)?)\)|(-?\d+)))?)?')

    @classmethod
    def parse(cls, text, variable=None):
        text = text.replace(' ', '').replace('−', '-')
        if variable is None:
            variable = 'A' if 'A' in text else 's'
        if text in ('', '0'):
            return cls({}, variable)
        if text[0] not in '+-':
            text = '+' + text
        result = cls({}, variable)
        position = 0
        while position < len(text):
            match = cls._TERM.match(text, position)
            if match is None or match.end() == position or not (match.group(2) or match.group(3)):
                raise InvalidDimension('cannot parse polynomial', text=text, position=position)
            sign, digits, symbol, fraction, integer = match.groups()
            coefficient = int(digits) if digits else 1
            if sign == '-':
                coefficient = -coefficient
            exponent = Fraction(0)
            if symbol:
                if symbol != variable:
                    raise InvalidDimension('mixed polynomial variables', text=text)
                exponent = Fraction(fraction or integer or 1)
            result = result + cls.monomial(exponent, coefficient, variable)
            position = match.end()
        return result


def s_poly(text):
    return LaurentPoly.parse(text, 's')


def a_poly(text):
    return LaurentPoly.parse(text, 'A')


S = LaurentPoly.monomial(1)
ONE = LaurentPoly.constant(1)
ZERO = LaurentPoly()
A = LaurentPoly.monomial(1, variable='A')
LOOP = -(A ** 2) - A ** -2


@dataclass(frozen=True)
class BurauMatrix:
    entries: tuple

    @property
    def dim(self):
        return len(self.entries)

    @classmethod
    def identity(cls, dim):
        return cls(tuple(tuple(ONE if i == j else ZERO for j in range(dim)) for i in range(dim)))

    def __matmul__(self, other):
        n = self.dim
        return BurauMatrix(tuple(
            tuple(sum((self.entries[i][l] * other.entries[l][j] for l in range(n)), ZERO) for j in range(n))
            for i in range(n)
        ))

    def determinant(self):
        """Формула Лейбница: размерность не превышает N − 1"""
        n = self.dim
        if n == 0:
            return ONE
        total = ZERO
        for perm in permutations(range(n)):
            inversions = sum(1 for a in range(n) for b in range(a + 1, n) if perm[a] > perm[b])
            term = ONE if inversions % 2 == 0 else -ONE
            for row, column in enumerate(perm):
                term = term * self.entries[row][column]
                if term.is_zero:
                    break
            total = total + term
        return total

    def to_strings(self):
        return [[str(entry) for entry in row] for row in self.entries]


def burau_generator(n, i, inverse=False):
    """Редуцированное представление Бурау σ_i (или σ_i⁻¹) в B_n"""
    if not 1 <= i <= n - 1:
        raise InvalidDimension('generator index out of range', n=n, i=i)
    dim = n - 1
    rows = [[ONE if r == c else ZERO for c in range(dim)] for r in range(dim)]
    row = i - 1
    s_inv = S ** -1
    if inverse:
        if row > 0:
            rows[row][row - 1] = ONE
        rows[row][row] = -s_inv
        if row < dim - 1:
            rows[row][row + 1] = s_inv
    else:
        if row > 0:
            rows[row][row - 1] = S
        rows[row][row] = -S
        if row < dim - 1:
            rows[row][row + 1] = ONE
    return BurauMatrix(tuple(tuple(r) for r in rows))


def burau(word):
    result = BurauMatrix.identity(word.strand_count - 1)
    for index, sign in word.generators:
        result = result @ burau_generator(word.strand_count, index, inverse=sign < 0)
    return result


def alexander(word, normalization='burau'):
    """Многочлен Александера замыкания косы в каноническом виде"""
    matrix = burau(word)
    n = matrix.dim
    difference = BurauMatrix(tuple(
        tuple((ONE if i == j else ZERO) - matrix.entries[i][j] for j in range(n)) for i in range(n)
    ))
    numerator = difference.determinant()
    if normalization == 'burau':
        divisor = sum((S ** p for p in range(word.strand_count)), ZERO)
    elif normalization == 'one_minus_s':
        divisor = ONE - S
    else:
        raise InvalidDimension('unknown Alexander normalization', normalization=normalization)
    return numerator.divide_exact(divisor).canonical()


def writhe(word):
    return sum(sign for _, sign in word.generators)


def closure_components(word):
    """Число компонент замыкания: циклы перестановки косы"""
    mapping = braid_permutation(word)
    seen, count = set(), 0
    for start in range(len(mapping)):
        if start in seen:
            continue
        count += 1
        current = start
        while current not in seen:
            seen.add(current)
            current = mapping[current]
    return count


def _state_edges(word):
    """Рёбра, общие для всех состояний, и две альтернативы для каждого перекрёстка"""
    n, m = word.strand_count, len(word)

    def node(level, position):
        return level * n + position

    common = [(node(m, p), node(0, p)) for p in range(n)]
    choices = []
    for level, (index, sign) in enumerate(word.generators):
        left, right = index - 1, index
        for p in range(n):
            if p not in (left, right):
                common.append((node(level, p), node(level + 1, p)))
        vertical = [(node(level, left), node(level + 1, left)), (node(level, right), node(level + 1, right))]
        horizontal = [(node(level, left), node(level, right)), (node(level + 1, left), node(level + 1, right))]
        # A-сглаживание положительного перекрёстка вертикальное
        choices.append((vertical, horizontal) if sign > 0 else (horizontal, vertical))
    return common, choices, (m + 1) * n


def _bracket_chunk(word, start, stop):
    common, choices, size = _state_edges(word)
    m = len(choices)
    tally = Counter()
    for state in range(start, stop):
        edges = list(common)
        a_count = 0
        for bit in range(m):
            if state >> bit & 1:
                edges.extend(choices[bit][1])
            else:
                edges.extend(choices[bit][0])
                a_count += 1
        rows, cols = zip(*edges)
        graph = coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(size, size))
        loops, _ = connected_components(graph, directed=False)
        tally[(a_count - (m - a_count), loops)] += 1
    return tally


def _run_chunk(arguments):
    return _bracket_chunk(*arguments)


def kauffman_bracket(word, workers=None, max_crossings=None):
    """Сумма по состояниям сглаживаний замыкания косы"""
    max_crossings = get_setting('KAUFFMAN_MAX_CROSSINGS') if max_crossings is None else max_crossings
    m = len(word)
    if m > max_crossings:
        raise WordTooLong('braid word exceeds the state-sum cap', length=m, cap=max_crossings)
    if m == 0:
        return LOOP ** (word.strand_count - 1)

    total_states = 2 ** m
    if workers in (None, 1) or total_states < 1024:
        tally = _bracket_chunk(word, 0, total_states)
    else:
        bounds = np.linspace(0, total_states, workers + 1, dtype=np.int64)
        jobs = [(word, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
        tally = Counter()
        with ProcessPoolExecutor(max_workers=workers) as executor:
            for part in executor.map(_run_chunk, jobs):
                tally.update(part)

    result = LaurentPoly({}, 'A')
    for (exponent, loops), count in tally.items():
        result = result + count * LaurentPoly({exponent: 1}, 'A') * LOOP ** (loops - 1)
    return result


def jones(word, workers=None):
    """V = (−A³)^{−w}⟨D⟩ при A = s^{−1/4}"""
    w = writhe(word)
    normalization = LaurentPoly({-3 * w: (-1) ** (w % 2)}, 'A')
    return (normalization * kauffman_bracket(word, workers=workers)).substitute()


@dataclass(frozen=True)
class LinkRow:
    label: str
    word: str
    strands: int
    writhe: int
    bracket: str
    alexander: str
    jones: str

    @cached_property
    def braid(self):
        return BraidWord.parse(self.word, self.strands)

    @cached_property
    def jones_poly(self):
        return s_poly(self.jones)

    @cached_property
    def components(self):
        return closure_components(self.braid)

    @property
    def winding_signature(self):
        return WINDING_SIGNATURES.get(self.strands, {}).get(self.label)


LINK_TABLE = (
    LinkRow(KnotClass.HOPF_LINK, 's1 s1', 2, 2, '-A^4-A^(-4)', '1-s', '-s^(1/2)-s^(5/2)'),
    LinkRow(KnotClass.UNKNOT, 's1', 2, 1, '-A^3', '1', '1'),
    LinkRow(KnotClass.UNLINK, '', 2, 0, '-A^2-A^(-2)', '0', '-s^(-1/2)-s^(1/2)'),
    LinkRow(KnotClass.SOLOMON_KNOT, 's1 s3 s2 s1 s3 s2', 4, 6,
            '-A^12-A^4+1-A^(-4)', '1-s+s^2-s^3', '-s^(3/2)-s^(7/2)+s^(9/2)-s^(11/2)'),
    LinkRow(KnotClass.HOPF_CHAIN, 's1 s3 s1 s3 s2', 4, 5,
            '-A^11-2A^3-A^(-5)', '1-2s+s^2', 's+2s^3+s^5'),
    LinkRow(KnotClass.HOPF_LINK, 's2 s1 s3 s2', 4, 4, '-A^10-A^2', '1-s', '-s^(1/2)-s^(5/2)'),
    LinkRow(KnotClass.UNKNOT, 's2 s1 s3', 4, 3, '-A^9', '1', '1'),
    LinkRow(KnotClass.UNLINK, 's1 s3', 4, 2, '-A^8-A^4', '0', '-s^(-1/2)-s^(1/2)'),
    LinkRow(KnotClass.HOPF_LINK_PLUS_UNLINK, 's2 s2', 4, 2,
            '-A^8-2A^4-2-2A^(-4)-A^(-8)', '0', '-s^(-1/2)-2s^(1/2)-2s^(3/2)-2s^(5/2)-s^(7/2)'),
    LinkRow(KnotClass.UNKNOT_PLUS_UNLINK, 's2', 4, 1, '-A^7-2A^3-A^(-1)', '0', 's^(-1)+2+s'),
    LinkRow(KnotClass.DOUBLE_UNLINKS, '', 4, 0,
            '-A^6-3A^2-3A^(-2)-A^(-6)', '0', '-s^(-3/2)-3s^(-1/2)-3s^(1/2)-s^(3/2)'),
)


def classify_link(word, winding=None, workers=None):
    """Класс по многочлену Джонса и числу компонент; матрица намоток только сверяется"""
    polynomial = jones(word, workers=workers)
    components = closure_components(word)
    for row in LINK_TABLE:
        if row.jones_poly == polynomial and row.components == components:
            label = KnotClass(row.label)
            break
    else:
        raise Unclassified('no table row matches the braid closure',
                           word=str(word), jones=str(polynomial), components=components)

    if winding is not None:
        winding = np.asarray(winding, dtype=float)
        entries = winding[np.triu_indices(winding.shape[0], 1)]
        from_winding = match_winding_signature(entries, winding.shape[0], tolerance=1e-6)
        if from_winding != label:
            logger.warning('winding matrix suggests %s but the Jones polynomial gives %s',
                           from_winding, label)
    return label


def link_invariants(word, workers=None):
    """Сводка инвариантов замыкания косы в печатной записи"""
    return {
        'word': str(word),
        'strands': word.strand_count,
        'writhe': writhe(word),
        'components': closure_components(word),
        'bracket': kauffman_bracket(word, workers=workers).format(),
        'alexander': alexander(word).format(),
        'jones': jones(word, workers=workers).format(),
    }
