"""Frozen-set construction and layer-permutation ranking.

Synthetic-channel reliabilities are tracked in decode-position order: entry 0
is the bit decoded first (the all-XOR branch), and splitting entry q yields
the degraded branch at 2q and the upgraded branch at 2q+1.  A monomial mask v
is decoded through the position whose transform sequence takes the degraded
branch for every set bit of v, most significant processed variable first.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import erfc

from .codes import FrozenSpec, MonomialCode, polar_code
from .sim import Bec, BiAwgn, ChannelModel, noise_sigma


def bec_density_evolution(m: int, eps: float) -> np.ndarray:
    """Exact per-position erasure probabilities after m splitting levels."""
    if not 0 <= eps <= 1:
        raise ValueError("erasure probability must lie in [0, 1]")
    z = np.array([eps], dtype=np.float64)
    for _ in range(m):
        out = np.empty(2 * z.size, dtype=np.float64)
        out[0::2] = 2 * z - z * z  # degraded: erased unless both halves arrive
        out[1::2] = z * z          # upgraded: erased only if both are
        z = out
    return z


# ---------------------------------------------------------------------------
# Gaussian-approximation mean-LLR tracking.
#
# phi(x) approximates E[tanh(L/2)] deficit for L ~ N(x, 2x):
#   phi(x) = exp(0.0218 - 0.4527 * x^0.86)            for x < 10
#   phi(x) = sqrt(pi/x) * exp(-x/4) * (1 - 10/(7x))   for x >= 10
# handled in the log domain so deep recursions do not underflow.

_PHI_A, _PHI_B, _PHI_C = 0.0218, 0.4527, 0.86
_PHI_SWITCH = 10.0
_TABLE_X = np.logspace(np.log10(_PHI_SWITCH), 7.0, 8192)


def _phi_log(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    small = x < _PHI_SWITCH
    out = np.empty_like(x)
    xs = np.where(small, x, 1.0)
    out[small] = (_PHI_A - _PHI_B * np.power(xs, _PHI_C))[small]
    xl = np.where(small, _PHI_SWITCH, x)
    out[~small] = (0.5 * (np.log(np.pi) - np.log(xl)) - xl / 4 + np.log1p(-10.0 / (7.0 * xl)))[~small]
    return out


_TABLE_LOGPHI = _phi_log(_TABLE_X)


def _phi_inv_log(log_y: np.ndarray) -> np.ndarray:
    """Inverse of phi given log(y); closed form below the switch, table above."""
    log_y = np.asarray(log_y, dtype=np.float64)
    thresh = _phi_log(np.array(_PHI_SWITCH))
    out = np.empty_like(log_y)
    closed = log_y >= thresh
    arg = np.maximum(_PHI_A - log_y, 0.0) / _PHI_B
    out[closed] = np.power(arg, 1.0 / _PHI_C)[closed]
    big = ~closed
    if big.any():
        # table of log(phi) is decreasing in x; interp over the negated values
        out[big] = np.interp(-log_y[big], -_TABLE_LOGPHI, _TABLE_X)
    return out


def _ga_split(mu: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean-LLR images of one polarization step (degraded, upgraded)."""
    log_phi = _phi_log(mu)
    phi = np.exp(np.minimum(log_phi, 0.0))
    log_y = np.minimum(log_phi + np.log(2.0 - phi), 0.0)
    return _phi_inv_log(log_y), 2.0 * mu


def ga_llr_means(m: int, mu0: float) -> np.ndarray:
    """Per-position mean LLRs under the Gaussian approximation."""
    mu = np.array([mu0], dtype=np.float64)
    for _ in range(m):
        out = np.empty(2 * mu.size, dtype=np.float64)
        out[0::2], out[1::2] = _ga_split(mu)
        mu = out
    return mu


def _ga_error_probs(mu: np.ndarray) -> np.ndarray:
    return 0.5 * erfc(np.sqrt(np.maximum(mu, 0.0)) / 2.0)


def ga_frozen_set(m: int, k: int, ebn0_db: float, code_rate: float | None = None) -> FrozenSpec:
    """Freeze the 2^m - k least reliable positions for a BI-AWGN channel."""
    n = 1 << m
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= 2^m")
    rate = code_rate if code_rate is not None else k / n
    sigma = noise_sigma(ebn0_db, rate)
    mu = ga_llr_means(m, 2.0 / sigma**2)
    pe = _ga_error_probs(mu)
    order = np.lexsort((np.arange(n), -pe))  # worst first, ties by index
    return FrozenSpec(m, frozenset(int(i) for i in order[: n - k]))


def bec_frozen_set(m: int, k: int, eps: float) -> FrozenSpec:
    """Freeze the 2^m - k most erasure-prone positions of a BEC."""
    n = 1 << m
    if not 0 < k <= n:
        raise ValueError("need 0 < k <= 2^m")
    z = bec_density_evolution(m, eps)
    order = np.lexsort((np.arange(n), -z))
    return FrozenSpec(m, frozenset(int(i) for i in order[: n - k]))


# ---------------------------------------------------------------------------
# per-mask reliabilities under a layer permutation


def _check_perm(m: int, perm: Sequence[int] | None) -> tuple[int, ...]:
    if perm is None:
        return tuple(range(m))
    perm = tuple(perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm!r} is not a permutation of range({m})")
    return perm


def _branch_error_probs(m: int, channel: ChannelModel, rate: float) -> np.ndarray:
    """Bit-error probability of every transform branch; the recursion does not
    depend on the layer order, only the mask-to-branch gather does.  Branch q
    takes the degraded split at level ell iff bit ell of q is set, highest
    level first."""
    if isinstance(channel, Bec):
        state = np.array([channel.eps], dtype=np.float64)
        split = lambda z: (2 * z - z * z, z * z)
        finish = lambda z: z / 2.0  # an erasure resolves to a coin flip
    elif isinstance(channel, BiAwgn):
        sigma = noise_sigma(channel.ebn0_db, rate)
        state = np.array([2.0 / sigma**2], dtype=np.float64)
        split = _ga_split
        finish = _ga_error_probs
    else:
        raise TypeError(f"unsupported channel {channel!r}")
    for _ in range(m):
        out = np.empty(2 * state.size, dtype=np.float64)
        minus, plus = split(state)
        out[0::2] = plus   # appended index bit 0: upgraded branch
        out[1::2] = minus  # appended index bit 1: degraded branch
        state = out
    return finish(state)


def _branch_positions(masks: np.ndarray, perms: np.ndarray) -> np.ndarray:
    """(P, len(masks)) branch indices: perm[m-1] is the variable split first."""
    m = perms.shape[1]
    pos = np.zeros((perms.shape[0], masks.size), dtype=np.int64)
    for level in range(m):
        pos |= ((masks[None, :] >> perms[:, level, None]) & 1) << level
    return pos


def mask_error_probs(
    m: int, channel: ChannelModel, perm: Sequence[int] | None = None, rate: float = 0.5
) -> np.ndarray:
    """SC bit-error probability of every monomial mask under a layer order.

    perm[m-1] is the variable split first; a set bit sends the mask through
    the degraded branch of its level.
    """
    perm = _check_perm(m, perm)
    branch = _branch_error_probs(m, channel, rate)
    pos = _branch_positions(np.arange(1 << m), np.array([perm]))[0]
    return branch[pos]


def sc_error_estimate(
    code: MonomialCode | FrozenSpec,
    perm: Sequence[int] | None,
    channel: ChannelModel,
) -> float:
    """Union-bound SC frame-error estimate under a layer permutation."""
    if isinstance(code, FrozenSpec):
        code = polar_code(code)
    pe = mask_error_probs(code.m, channel, perm, rate=code.k / code.n)
    log_ok = np.log1p(-np.minimum(pe[code.sorted_masks()], 1.0 - 1e-300))
    return float(-np.expm1(log_ok.sum()))


@dataclass(frozen=True)
class PermutationSelection:
    perms: tuple[tuple[int, ...], ...]
    scores: tuple[float, ...]
    complete: bool   # False when fewer than the requested P satisfied the spacing
    sampled: bool    # True when m! was too large to enumerate


def permutation_distance(p1: Sequence[int], p2: Sequence[int]) -> int:
    """Number of positions where the two layer orders disagree."""
    return sum(1 for a, b in zip(p1, p2) if a != b)


_SAMPLE_LIMIT = 8
_SAMPLE_COUNT = 100_000


def select_permutations(
    code: MonomialCode | FrozenSpec,
    p_count: int,
    channel: ChannelModel,
    min_dist: int = 5,
    mc_frames: int = 0,
    seed: int = 0,
) -> PermutationSelection:
    """Rank layer permutations by estimated SC error and pick P spread-out ones.

    Candidates are sorted by the union-bound estimate (or a seeded Monte
    Carlo run when mc_frames > 0) and kept greedily so that every retained
    pair differs in at least min_dist positions; the best candidate is always
    retained.
    """
    if isinstance(code, FrozenSpec):
        code = polar_code(code)
    if p_count < 1:
        raise ValueError("need P >= 1")
    m = code.m
    sampled = m > _SAMPLE_LIMIT
    if sampled:
        rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
        cand = {tuple(range(m))}
        while len(cand) < _SAMPLE_COUNT:
            cand.update(tuple(int(x) for x in rng.permutation(m)) for _ in range(1024))
        candidates = sorted(cand)
    else:
        candidates = [tuple(p) for p in itertools.permutations(range(m))]

    if mc_frames > 0:
        scores = [_mc_score(code, perm, channel, mc_frames, seed) for perm in candidates]
    else:
        branch = _branch_error_probs(m, channel, code.k / code.n)
        log_ok = np.log1p(-np.minimum(branch, 1.0 - 1e-300))
        pos = _branch_positions(
            np.array(code.sorted_masks()), np.array(candidates, dtype=np.int64)
        )
        scores = (-np.expm1(log_ok[pos].sum(axis=1))).tolist()

    ranked = sorted(zip(scores, candidates))
    kept: list[tuple[int, ...]] = []
    kept_scores: list[float] = []
    for score, perm in ranked:
        if len(kept) == p_count:
            break
        if all(permutation_distance(perm, q) >= min_dist for q in kept):
            kept.append(perm)
            kept_scores.append(score)
    return PermutationSelection(
        perms=tuple(kept),
        scores=tuple(kept_scores),
        complete=len(kept) == p_count,
        sampled=sampled,
    )


def _mc_score(code, perm, channel, frames, seed) -> float:
    from . import decode as _decode
    from . import sim as _sim

    cfg = _sim.SimConfig(max_errors=frames + 1, max_frames=frames, seed=seed, decoder="sc")
    result = _sim.simulate_fer(code, channel, cfg, layer_perm=perm)
    return result.fer
