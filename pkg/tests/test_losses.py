"""Loss formulas against brute-force scalar oracles.

The oracles below loop over cells in pure Python and evaluate the formulas
term by term; expected values in the hand cases were frozen from those
oracle runs. [DERIVED]
"""

import math

import numpy as np
import pytest

from fisheyebev.errors import DomainError
from fisheyebev.losses import (
    HEATMAP_EPS,
    bin_ce_loss,
    focal_loss,
    l1_loss,
    laplacian_uncertainty_loss,
)


def focal_oracle(h, hs, gamma=2.0, beta=4.0):
    total = 0.0
    n_pos = 0
    for p, t in zip(h.ravel(), hs.ravel()):
        p = min(max(p, HEATMAP_EPS), 1.0 - HEATMAP_EPS)
        if t == 1.0:
            n_pos += 1
            total += (1.0 - p) ** gamma * math.log(p)
        else:
            total += (1.0 - t) ** beta * p**gamma * math.log(1.0 - p)
    if n_pos == 0:
        return 0.0
    return -total / n_pos


def l1_oracle(s, t, mask, weight=1.0):
    m = np.broadcast_to(np.asarray(mask, dtype=bool), s.shape)
    vals = [abs(a - b) for a, b, keep in zip(s.ravel(), t.ravel(), m.ravel()) if keep]
    if not vals:
        return 0.0
    return weight * sum(vals) / len(vals)


def laplace_oracle(d, ls, ds, mask):
    vals = []
    for a, b, c, keep in zip(d.ravel(), ls.ravel(), ds.ravel(), np.asarray(mask, bool).ravel()):
        if keep:
            vals.append(math.sqrt(2.0) * abs(a - c) / math.exp(b) + b)
    if not vals:
        return 0.0
    return sum(vals) / len(vals)


def bin_ce_oracle(logits, idx, mask):
    n_bins = logits.shape[0]
    vals = []
    for y in range(logits.shape[1]):
        for x in range(logits.shape[2]):
            if not mask[y, x]:
                continue
            z = [logits[b, y, x] for b in range(n_bins)]
            denom = sum(math.exp(v) for v in z)
            vals.append(-math.log(math.exp(z[idx[y, x]]) / denom))
    if not vals:
        return 0.0
    return sum(vals) / len(vals)


class TestFocal:
    def test_no_positives_is_zero(self):
        h = np.full((4, 4), 0.3)
        hs = np.full((4, 4), 0.5)
        assert focal_loss(h, hs) == 0.0

    def test_perfect_prediction_is_tiny(self):
        hs = np.zeros((4, 4))
        hs[1, 2] = 1.0
        loss = focal_loss(hs.copy(), hs)
        # only clamp slack remains: (1 - (1-eps))^2 * log(1-eps) ~ eps^3
        assert 0.0 <= loss < 1e-12

    def test_hand_case(self):
        h = np.array([[0.9, 0.2], [0.1, 0.4]])
        hs = np.array([[1.0, 0.5], [0.0, 1.0]])
        assert focal_loss(h, hs) == pytest.approx(focal_oracle(h, hs), rel=1e-12)

    def test_random_tensors(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            h = rng.uniform(0.0, 1.0, (3, 6, 7))
            hs = rng.uniform(0.0, 1.0, (3, 6, 7))
            hs[rng.uniform(size=hs.shape) < 0.1] = 1.0
            assert focal_loss(h, hs) == pytest.approx(focal_oracle(h, hs), rel=1e-9)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            focal_loss(np.zeros((2, 2)), np.zeros((2, 3)))


class TestL1:
    def test_hand_case(self):
        s = np.array([[1.0, 5.0], [2.0, -1.0]])
        t = np.array([[0.0, 2.0], [2.0, 3.0]])
        mask = np.array([[True, True], [False, True]])
        # |1| + |3| + |-4| over 3 cells = 8/3
        assert l1_loss(s, t, mask) == pytest.approx(8.0 / 3.0, rel=1e-14)

    def test_weight_and_channels(self):
        rng = np.random.default_rng(5)
        s = rng.normal(size=(3, 4, 4))
        t = rng.normal(size=(3, 4, 4))
        mask = rng.uniform(size=(4, 4)) < 0.5
        got = l1_loss(s, t, mask, weight=0.7)
        assert got == pytest.approx(l1_oracle(s, t, mask, 0.7), rel=1e-12)

    def test_empty_mask(self):
        assert l1_loss(np.ones((2, 2)), np.zeros((2, 2)), np.zeros((2, 2), bool)) == 0.0


class TestLaplacian:
    def test_zero_residual(self):
        d = np.full((2, 2), 3.0)
        ls = np.zeros((2, 2))
        mask = np.ones((2, 2), bool)
        # sigma = 1, residual 0 -> loss = log(1) = 0
        assert laplacian_uncertainty_loss(d, ls, d, mask) == pytest.approx(0.0, abs=1e-15)

    def test_unit_residual_unit_sigma(self):
        d = np.array([[4.0]])
        ds = np.array([[3.0]])
        ls = np.zeros((1, 1))
        mask = np.ones((1, 1), bool)
        got = laplacian_uncertainty_loss(d, ls, ds, mask)
        assert got == pytest.approx(math.sqrt(2.0), rel=1e-14)

    def test_random_tensors(self):
        rng = np.random.default_rng(17)
        for _ in range(20):
            d = rng.uniform(1.0, 20.0, (5, 5))
            ds = rng.uniform(1.0, 20.0, (5, 5))
            ls = rng.normal(0.0, 1.0, (5, 5))
            mask = rng.uniform(size=(5, 5)) < 0.6
            got = laplacian_uncertainty_loss(d, ls, ds, mask)
            assert got == pytest.approx(laplace_oracle(d, ls, ds, mask), rel=1e-9)

    def test_minimized_at_matched_sigma(self):
        """For a fixed residual r the per-cell loss sqrt(2) r / sigma + log sigma
        is minimized at sigma = sqrt(2) r; check by grid sweep."""
        residual = 0.8
        d = np.array([[residual]])
        ds = np.array([[0.0]])
        mask = np.ones((1, 1), bool)
        grid = np.linspace(-3.0, 3.0, 2001)
        losses = [
            laplacian_uncertainty_loss(d, np.array([[g]]), ds, mask) for g in grid
        ]
        best = grid[int(np.argmin(losses))]
        assert best == pytest.approx(math.log(math.sqrt(2.0) * residual), abs=5e-3)


class TestBinCE:
    def test_uniform_logits(self):
        logits = np.zeros((2, 3, 3))
        idx = np.zeros((3, 3), dtype=int)
        mask = np.ones((3, 3), bool)
        assert bin_ce_loss(logits, idx, mask) == pytest.approx(math.log(2.0), rel=1e-14)

    def test_confident_correct(self):
        logits = np.zeros((2, 1, 1))
        logits[1, 0, 0] = 20.0
        idx = np.ones((1, 1), dtype=int)
        mask = np.ones((1, 1), bool)
        assert bin_ce_loss(logits, idx, mask) < 1e-8

    def test_random_tensors(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            logits = rng.normal(0.0, 3.0, (4, 5, 6))
            idx = rng.integers(0, 4, (5, 6))
            mask = rng.uniform(size=(5, 6)) < 0.5
            got = bin_ce_loss(logits, idx, mask)
            assert got == pytest.approx(bin_ce_oracle(logits, idx, mask), rel=1e-9)

    def test_numerically_stable_for_large_logits(self):
        logits = np.zeros((2, 1, 1))
        logits[0, 0, 0] = 1000.0
        idx = np.zeros((1, 1), dtype=int)
        mask = np.ones((1, 1), bool)
        assert bin_ce_loss(logits, idx, mask) == pytest.approx(0.0, abs=1e-12)

    def test_empty_mask(self):
        assert bin_ce_loss(np.zeros((2, 2, 2)), np.zeros((2, 2), int), np.zeros((2, 2), bool)) == 0.0
