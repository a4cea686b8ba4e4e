"""Shared fixtures: seeded random row contractions, partial isometries,
and ball-point samplers used across the test modules."""

import numpy as np
import pytest

from ncdbr import RowContraction, sample_ball_point


def random_contraction(seed, d, m, norm=0.9):
    """Seeded random strict row contraction with exact row norm."""
    rng = np.random.default_rng(seed)
    row = rng.standard_normal((m, m * d)) + 1j * rng.standard_normal((m, m * d))
    row *= norm / np.linalg.norm(row, 2)
    return RowContraction(tuple(row[:, j * m : (j + 1) * m] for j in range(d)))


def random_partial_isometry(seed, d, m, rank):
    """Seeded random row partial isometry of the given rank (0 allowed)."""
    rng = np.random.default_rng(seed)
    if rank == 0:
        row = np.zeros((m, m * d), dtype=complex)
    else:
        K = np.linalg.qr(
            rng.standard_normal((m * d, rank)) + 1j * rng.standard_normal((m * d, rank))
        )[0]
        W = np.linalg.qr(
            rng.standard_normal((m, rank)) + 1j * rng.standard_normal((m, rank))
        )[0]
        row = W @ K.conj().T
    return RowContraction(tuple(row[:, j * m : (j + 1) * m] for j in range(d)))


def ball_points(d, count, radius=0.5, seed=100, levels=(1, 2)):
    return [
        sample_ball_point(d, levels[k % len(levels)], radius, seed + k)
        for k in range(count)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def pytest_terminal_summary(terminalreporter):
    # surface the per-criterion verdict lines even when capture is on
    try:
        from test_acceptance import CRITERION_LINES
    except ImportError:
        return
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERION_LINES):
            terminalreporter.write_line(line)
