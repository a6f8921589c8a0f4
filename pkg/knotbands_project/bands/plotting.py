"""SVG-графики: следы намоток, диаграммы кос, торические кривые, траектории Λ."""
import logging
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .twister import BOUNDARY_NAMES, boundary_fields, torus_embedding  # noqa: E402

logger = logging.getLogger(__name__)

STYLE = {
    'svg.hashsalt': 'knotbands',
    'svg.fonttype': 'none',
    'font.size': 10,
}


def _save(fig, path):
    path = Path(path)
    fig.savefig(path, format='svg', bbox_inches='tight', metadata={'Date': None})
    plt.close(fig)
    logger.debug('wrote %s', path)
    return path


def _colors(count):
    return plt.cm.tab10(np.arange(max(count, 1)) % 10)


def plot_winding(trace, path, crossings=()):
    """Следы W̃_ij(k) с пунктиром на уровнях 1/4 + r/2 и отметками пересечений"""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(7, 4))
        pairs = trace.pairs if trace is not None else []
        colors = _colors(len(pairs))
        low, high = 0.0, 0.0
        for color, pair in zip(colors, pairs):
            series = trace.values[pair]
            ax.plot(trace.k_grid, series, color=color, label=f'W_{pair[0] + 1}{pair[1] + 1}')
            low, high = min(low, series.min()), max(high, series.max())
        if pairs:
            for r in range(int(np.floor(2 * (low - 0.25))), int(np.ceil(2 * (high - 0.25))) + 1):
                level = 0.25 + r / 2
                if low - 0.1 <= level <= high + 0.1:
                    ax.axhline(level, color='black', linestyle='--', linewidth=0.8)
            for crossing in crossings:
                ax.plot([crossing.k], [0.25 + crossing.r / 2], marker='o', color='black', markersize=4)
            ax.legend(loc='best')
            ax.set_xlim(trace.k_grid[0], trace.k_grid[-1])
        ax.set_xlabel('k')
        ax.set_ylabel('W(k)')
        return _save(fig, path)


def plot_braid(word, path):
    """Диаграмма косы: образующие снизу вверх, верхняя нить рисуется без разрыва"""
    n = word.strand_count
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(0.8 * n + 1, 0.6 * max(len(word), 1) + 1))
        colors = _colors(n)
        strands = list(range(n))
        for level, (index, sign) in enumerate(word.generators):
            left, right = index - 1, index
            for position in range(n):
                if position not in (left, right):
                    ax.plot([position, position], [level, level + 1], color=colors[strands[position]])
            over, under = (left, right) if sign > 0 else (right, left)
            ax.plot([under, over], [level, level + 1], color=colors[strands[under]],
                    linewidth=1.5, zorder=1)
            ax.plot([over, under], [level, level + 1], color='white', linewidth=6, zorder=2)
            ax.plot([over, under], [level, level + 1], color=colors[strands[over]],
                    linewidth=1.5, zorder=3)
            strands[left], strands[right] = strands[right], strands[left]
        if not word.generators:
            for position in range(n):
                ax.plot([position, position], [0, 1], color=colors[position])
        ax.set_title(str(word) or 'empty word')
        ax.set_axis_off()
        return _save(fig, path)


def plot_torus(n, v, path, samples=400):
    """Кривые γ_j(k) чистого твистера на торе"""
    k = np.linspace(0.0, 2 * np.pi, samples)
    with plt.rc_context(STYLE):
        fig = plt.figure(figsize=(5, 5))
        ax = fig.add_subplot(projection='3d')
        for j, color in zip(range(n), _colors(n)):
            points = np.array([torus_embedding(n, v, j, value) for value in k])
            ax.plot(points[:, 0], points[:, 1], points[:, 2], color=color)
        ax.set_title(f'N={n}, V={v}')
        ax.set_axis_off()
        return _save(fig, path)


def plot_trajectories(traj, path):
    """Λ_i(k) на комплексной плоскости"""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(5, 5))
        for band, color in zip(range(traj.n_bands), _colors(traj.n_bands)):
            values = traj.lambda_values[band]
            ax.plot(values.real, values.imag, color=color, label=f'band {band + 1}')
            ax.plot([values[0].real], [values[0].imag], marker='o', color=color)
        ax.set_xlabel('Re Λ')
        ax.set_ylabel('Im Λ')
        ax.set_aspect('equal', adjustable='datalim')
        ax.legend(loc='best')
        return _save(fig, path)


def plot_phase_diagram(m0_values, m1_values, labels, path):
    """Растр классов фазовой диаграммы; пустая метка означает граничную ячейку"""
    names = sorted({label for label in labels if label})
    index = {name: i for i, name in enumerate(names)}
    grid = np.full((len(m1_values), len(m0_values)), np.nan)
    for (i, j), label in np.ndenumerate(np.asarray(labels, dtype=object).reshape(len(m0_values), len(m1_values))):
        if label:
            grid[j, i] = index[label]
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(6, 5))
        mesh = ax.pcolormesh(m0_values, m1_values, grid, cmap='tab10', vmin=0, vmax=9, shading='nearest')
        ax.set_xlabel('m0')
        ax.set_ylabel('m1')
        if names:
            bar = fig.colorbar(mesh, ax=ax, ticks=range(len(names)))
            bar.ax.set_yticklabels(names)
        return _save(fig, path)


def boundary_polylines(n_bands, m0_values, m1_values):
    """Нулевые линии активных граничных функций как ломаные (имя, массив точек m0, m1)"""
    m0, m1 = np.meshgrid(m0_values, m1_values, indexing='ij')
    values, active = boundary_fields(n_bands, m0, m1)
    polylines = []
    fig, ax = plt.subplots()
    try:
        for name, field, mask in zip(BOUNDARY_NAMES[n_bands], values, active):
            if not mask.any():
                continue
            contour = ax.contour(m0, m1, np.ma.masked_where(~mask, field), levels=[0.0])
            polylines.extend((name, segment) for segment in contour.allsegs[0] if len(segment) > 1)
    finally:
        plt.close(fig)
    return polylines
