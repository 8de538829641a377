"""SC, SC-list, permutation, and brute-force ML decoders over LLR inputs.

Positive LLR favors bit 0.  The successive-cancellation recursion first
resolves the XOR of the two codeword halves (the derivative part) and then
the second half given that estimate; a layer permutation relabels which
variable each recursion level splits, with the identity order splitting the
most significant variable first.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .bitmath import BitVec
from .codes import LinearCode, MonomialCode, monomial_to_linear

LLR_CLAMP = 1e30  # stands in for +/- infinity so BEC inputs stay arithmetic-safe

ML_MAX_DIMENSION = 20


def _clamp(llr: np.ndarray) -> np.ndarray:
    llr = np.asarray(llr, dtype=np.float64)
    if np.isnan(llr).any():
        raise ValueError("LLR vector contains NaN")
    return np.clip(llr, -LLR_CLAMP, LLR_CLAMP)


def correlation_metric(bits: np.ndarray | BitVec, llr: np.ndarray) -> float:
    """Codeword-to-received-vector correlation; larger means closer."""
    if isinstance(bits, BitVec):
        bits = bits.to_array()
    return float(np.dot(_clamp(llr), 1.0 - 2.0 * np.asarray(bits, dtype=np.float64)))


def llr_check(a: np.ndarray, b: np.ndarray, min_sum: bool = False) -> np.ndarray:
    """Check-node combine: exact tanh rule in a numerically stable form,
    min-sum plus the standard log-domain correction."""
    base = np.sign(a) * np.sign(b) * np.minimum(np.abs(a), np.abs(b))
    if min_sum:
        return base
    return base + np.log1p(np.exp(-np.abs(a + b))) - np.log1p(np.exp(-np.abs(a - b)))


@dataclass(frozen=True)
class DecodeResult:
    """Decoded codeword plus the coefficient vector that encodes to it.

    `candidates` is sorted by metric, best first; `ties` counts zero-LLR
    decisions taken during plain SC decoding.
    """

    codeword: BitVec
    u: BitVec
    metric: float
    candidates: tuple[tuple[BitVec, float], ...] = field(default=())
    ties: int = 0


@functools.lru_cache(maxsize=128)
def _setup(m: int, gen_set: frozenset, perm: tuple[int, ...]):
    """Coordinate gather, leaf info pattern, and u gather for one decode order."""
    n = 1 << m
    y = np.arange(n)
    var_idx = np.zeros(n, dtype=np.int64)
    for j in range(m):
        var_idx |= ((y >> j) & 1) << perm[j]
    coord = var_idx[::-1].copy()  # recursion coordinate -> original coordinate
    rel = np.zeros(n, dtype=np.int64)
    for j in range(m):
        rel |= ((y >> perm[j]) & 1) << j
    info = np.zeros(n, dtype=bool)
    info[[(n - 1) ^ int(rel[v]) for v in gen_set]] = True
    u_idx = (n - 1) ^ rel  # original mask -> leaf position
    return coord, info, u_idx


def _resolve_perm(m: int, layer_perm: Sequence[int] | None) -> tuple[int, ...]:
    if layer_perm is None:
        return tuple(range(m))
    perm = tuple(int(x) for x in layer_perm)
    if sorted(perm) != list(range(m)):
        raise ValueError(f"{perm!r} is not a permutation of range({m})")
    return perm


def _sc_rec(lam: np.ndarray, info: np.ndarray, min_sum: bool):
    if lam.shape[1] == 1:
        lam0 = lam[:, 0]
        if info[0]:
            u = (lam0 < 0).astype(np.uint8)
            ties = (lam0 == 0).astype(np.int64)
        else:
            u = np.zeros(lam.shape[0], dtype=np.uint8)
            ties = np.zeros(lam.shape[0], dtype=np.int64)
        bits = u[:, None].copy()
        return bits, u[:, None].copy(), ties
    h = lam.shape[1] // 2
    a, b = lam[:, :h], lam[:, h:]
    cw0, u0, t0 = _sc_rec(llr_check(a, b, min_sum), info[:h], min_sum)
    lg = b + (1.0 - 2.0 * cw0) * a
    cw1, u1, t1 = _sc_rec(lg, info[h:], min_sum)
    return np.hstack([cw0 ^ cw1, cw1]), np.hstack([u0, u1]), t0 + t1


def sc_decode_batch(
    code: MonomialCode,
    llrs: np.ndarray,
    layer_perm: Sequence[int] | None = None,
    min_sum: bool = False,
):
    """Vectorized SC over a batch of frames: (B, n) LLRs in, (B, n) bits out."""
    perm = _resolve_perm(code.m, layer_perm)
    coord, info, u_idx = _setup(code.m, code.gen_set, perm)
    lam = _clamp(llrs)
    if lam.ndim != 2 or lam.shape[1] != code.n:
        raise ValueError(f"expected LLR batch of shape (B, {code.n})")
    bits_std, u_std, ties = _sc_rec(lam[:, coord], info, min_sum)
    codewords = np.empty_like(bits_std)
    codewords[:, coord] = bits_std
    return codewords, u_std[:, u_idx], ties


def sc_decode(
    code: MonomialCode,
    llr: np.ndarray,
    layer_perm: Sequence[int] | None = None,
    min_sum: bool = False,
) -> DecodeResult:
    """Successive cancellation decoding of a single frame."""
    cw, u, ties = sc_decode_batch(code, np.asarray(llr, dtype=np.float64)[None, :], layer_perm, min_sum)
    codeword = BitVec.from_array(cw[0])
    metric = correlation_metric(cw[0], llr)
    return DecodeResult(codeword, BitVec.from_array(u[0]), metric, ((codeword, metric),), int(ties[0]))


def _fork(lam0, metrics, L):
    pen0 = np.logaddexp(0.0, -lam0)
    pen1 = np.logaddexp(0.0, lam0)
    met2 = np.concatenate([metrics + pen0, metrics + pen1], axis=1)
    b, p = metrics.shape
    par2 = np.broadcast_to(np.tile(np.arange(p), 2), (b, 2 * p))
    bits2 = np.concatenate(
        [np.zeros((b, p), dtype=np.uint8), np.ones((b, p), dtype=np.uint8)], axis=1
    )
    if 2 * p <= L:
        return bits2, met2, np.ascontiguousarray(par2)
    order = np.argsort(met2, axis=1, kind="stable")[:, :L]
    return (
        np.take_along_axis(bits2, order, axis=1),
        np.take_along_axis(met2, order, axis=1),
        np.take_along_axis(par2, order, axis=1),
    )


def _scl_rec(lam: np.ndarray, metrics: np.ndarray, info: np.ndarray, L: int, min_sum: bool):
    b, p, length = lam.shape
    if length == 1:
        lam0 = lam[:, :, 0]
        if info[0]:
            bits, met, par = _fork(lam0, metrics, L)
            return bits[:, :, None], bits[:, :, None].copy(), met, par
        met = metrics + np.logaddexp(0.0, -lam0)
        bits = np.zeros((b, p, 1), dtype=np.uint8)
        par = np.ascontiguousarray(np.broadcast_to(np.arange(p), (b, p)))
        return bits, bits.copy(), met, par
    h = length // 2
    a, c = lam[:, :, :h], lam[:, :, h:]
    cw0, u0, met1, par1 = _scl_rec(llr_check(a, c, min_sum), metrics, info[:h], L, min_sum)
    sel = par1[:, :, None]
    lg = np.take_along_axis(c, sel, axis=1) + (1.0 - 2.0 * cw0) * np.take_along_axis(a, sel, axis=1)
    cw1, u1, met2, par2 = _scl_rec(lg, met1, info[h:], L, min_sum)
    sel2 = par2[:, :, None]
    cw0g = np.take_along_axis(cw0, sel2, axis=1)
    u0g = np.take_along_axis(u0, sel2, axis=1)
    bits = np.concatenate([cw0g ^ cw1, cw1], axis=2)
    u = np.concatenate([u0g, u1], axis=2)
    parents = np.take_along_axis(par1, par2, axis=1)
    return bits, u, met2, parents


def scl_decode_batch(
    code: MonomialCode,
    llrs: np.ndarray,
    L: int,
    layer_perm: Sequence[int] | None = None,
    min_sum: bool = False,
):
    """List decode a batch: returns (bits (B,P,n), u (B,P,n), penalties (B,P))."""
    if L < 1:
        raise ValueError("list size must be at least 1")
    perm = _resolve_perm(code.m, layer_perm)
    coord, info, u_idx = _setup(code.m, code.gen_set, perm)
    lam = _clamp(llrs)
    bits_std, u_std, penalties, _ = _scl_rec(
        lam[:, None, coord], np.zeros((lam.shape[0], 1)), info, L, min_sum
    )
    codewords = np.empty_like(bits_std)
    codewords[:, :, coord] = bits_std
    return codewords, u_std[:, :, u_idx], penalties


def scl_decode(
    code: MonomialCode,
    llr: np.ndarray,
    L: int,
    layer_perm: Sequence[int] | None = None,
    min_sum: bool = False,
) -> DecodeResult:
    """SC list decoding; the returned codeword is the closest list entry."""
    llr = np.asarray(llr, dtype=np.float64)
    cw, u, penalties = scl_decode_batch(code, llr[None, :], L, layer_perm, min_sum)
    cw, u, penalties = cw[0], u[0], penalties[0]
    metrics = np.array([correlation_metric(cw[i], llr) for i in range(cw.shape[0])])
    order = np.lexsort((penalties, np.arange(len(metrics)), -metrics))
    candidates = tuple(
        (BitVec.from_array(cw[i]), float(metrics[i])) for i in order
    )
    best = int(order[0])
    return DecodeResult(
        BitVec.from_array(cw[best]),
        BitVec.from_array(u[best]),
        float(metrics[best]),
        candidates,
    )


def permutation_decode(
    code: MonomialCode,
    llr: np.ndarray,
    perms: Sequence[Sequence[int]],
) -> DecodeResult:
    """SC decode under each layer order and keep the closest codeword."""
    if not perms:
        raise ValueError("permutation list is empty")
    llr = np.asarray(llr, dtype=np.float64)
    results = [sc_decode(code, llr, layer_perm=p) for p in perms]
    metrics = [r.metric for r in results]
    best = int(np.argmax(metrics))  # first occurrence wins ties
    order = np.lexsort((np.arange(len(metrics)), -np.asarray(metrics)))
    candidates = tuple((results[i].codeword, results[i].metric) for i in order)
    return DecodeResult(
        results[best].codeword, results[best].u, results[best].metric, candidates
    )


def ml_decode_bruteforce(code: LinearCode | MonomialCode, llr: np.ndarray) -> DecodeResult:
    """Exact maximum-likelihood decoding by scoring all 2^k codewords."""
    mono = code if isinstance(code, MonomialCode) else None
    lin = monomial_to_linear(code) if mono is not None else code
    if lin.k > ML_MAX_DIMENSION:
        raise ValueError(f"k={lin.k} exceeds the brute-force limit {ML_MAX_DIMENSION}")
    llr = np.asarray(llr, dtype=np.float64)
    signs = 1.0 - 2.0 * lin.generator_array().astype(np.float64)
    gen = lin.generator_array().astype(np.uint8)
    best_val = -np.inf
    best_idx = -1
    chunk = 1 << 12
    total = 1 << lin.k
    exps = np.arange(lin.k)
    lam = _clamp(llr)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        infos = ((idx[:, None] >> exps) & 1).astype(np.uint8)
        cws = (infos @ gen) & 1
        corr = (1.0 - 2.0 * cws.astype(np.float64)) @ lam
        local = int(np.argmax(corr))
        if corr[local] > best_val:
            best_val = float(corr[local])
            best_idx = start + local
    info_bits = ((best_idx >> exps) & 1).astype(np.uint8)
    cw = (info_bits @ gen) & 1
    metric = correlation_metric(cw, llr)
    codeword = BitVec.from_array(cw)
    if mono is not None:
        u = np.zeros(mono.n, dtype=np.uint8)
        u[mono.sorted_masks()] = info_bits
        u_vec = BitVec.from_array(u)
    else:
        u_vec = BitVec.from_array(info_bits)
    return DecodeResult(codeword, u_vec, metric, ((codeword, metric),))


def ml_lower_bound_flag(
    result: DecodeResult, transmitted: BitVec | np.ndarray, llr: np.ndarray
) -> bool:
    """True when the decoder output is at least as close as the true codeword.

    A run where every frame satisfies this yields a valid lower-bound estimate
    of maximum-likelihood performance.
    """
    return result.metric >= correlation_metric(transmitted, llr)
