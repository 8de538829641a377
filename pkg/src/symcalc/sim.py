"""Seeded Monte Carlo frame-error-rate estimation over BEC and BI-AWGN.

Every frame draws from its own counter-based substream, Philox keyed by
(seed, frame index): the info bits come first, then the channel noise.
Results are therefore bit-identical for any batch size, evaluation order, or
worker count.  Error counting compares codewords, and a decoding error whose
metric ties the transmitted codeword is reported separately as a tie.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .bitmath import BitVec
from .codes import MonomialCode, monomial_to_linear
from . import decode as _dec


@dataclass(frozen=True)
class Bec:
    """Binary erasure channel; erased coordinates carry LLR 0."""

    eps: float

    def __post_init__(self):
        if not 0 <= self.eps <= 1:
            raise ValueError("erasure probability must lie in [0, 1]")

    def describe(self) -> str:
        return f"bec:{self.eps:g}"

    @property
    def parameter(self) -> float:
        return self.eps


@dataclass(frozen=True)
class BiAwgn:
    """Binary-input AWGN channel with unit-energy BPSK at a given Eb/N0."""

    ebn0_db: float

    def describe(self) -> str:
        return f"awgn:{self.ebn0_db:g}"

    @property
    def parameter(self) -> float:
        return self.ebn0_db


ChannelModel = Bec | BiAwgn


def noise_sigma(ebn0_db: float, rate: float) -> float:
    """Noise standard deviation for unit-energy BPSK: sigma^2 = 1/(2 R Eb/N0)."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    return math.sqrt(1.0 / (2.0 * rate * 10.0 ** (ebn0_db / 10.0)))


def frame_rng(seed: int, frame: int) -> np.random.Generator:
    """The per-frame substream: Philox keyed by (seed, frame)."""
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1), frame]))


def transmit(
    channel: ChannelModel,
    codeword: BitVec | np.ndarray,
    rng: np.random.Generator,
    rate: float | None = None,
) -> np.ndarray:
    """BPSK-map a codeword (0 -> +1, 1 -> -1) and sample per-coordinate LLRs."""
    bits = codeword.to_array() if isinstance(codeword, BitVec) else np.asarray(codeword)
    n = bits.shape[0]
    symbols = 1.0 - 2.0 * bits.astype(np.float64)
    if isinstance(channel, Bec):
        erased = rng.random(n) < channel.eps
        return np.where(erased, 0.0, symbols * np.inf)
    if isinstance(channel, BiAwgn):
        if rate is None:
            raise ValueError("BI-AWGN needs the code rate to fix the noise level")
        sigma = noise_sigma(channel.ebn0_db, rate)
        y = symbols + sigma * rng.standard_normal(n)
        return 2.0 * y / sigma**2
    raise TypeError(f"unsupported channel {channel!r}")


@dataclass(frozen=True)
class SimConfig:
    max_errors: int = 1000
    max_frames: int = 1_000_000
    seed: int = 0
    decoder: str = "sc"  # sc | scl | perm | ml
    list_size: int = 8
    perm_count: int = 8
    perms: tuple[tuple[int, ...], ...] | None = None
    min_dist: int = 5
    batch: int = 256
    workers: int = 1
    all_zero: bool = False
    min_sum: bool = False

    def __post_init__(self):
        if self.max_errors <= 0 or self.max_frames <= 0 or self.batch <= 0:
            raise ValueError("limits must be positive")
        if self.decoder not in ("sc", "scl", "perm", "ml"):
            raise ValueError(f"unknown decoder {self.decoder!r}")

    def label(self) -> str:
        if self.decoder == "scl":
            return str(self.list_size)
        if self.decoder == "perm":
            return str(len(self.perms) if self.perms else self.perm_count)
        return ""


@dataclass(frozen=True)
class SimResult:
    frames: int
    errors: int
    fer: float
    ml_certified: float
    ties: int
    seed: int
    stop_reason: str  # "max_errors" | "max_frames"
    wall_seconds: float
    wilson_lo: float
    wilson_hi: float


def wilson_interval(errors: int, frames: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for the frame-error probability."""
    if frames == 0:
        return 0.0, 1.0
    phat = errors / frames
    denom = 1.0 + z * z / frames
    center = (phat + z * z / (2 * frames)) / denom
    half = z * math.sqrt(phat * (1 - phat) / frames + z * z / (4 * frames * frames)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _batch_correlations(codewords: np.ndarray, llrs: np.ndarray) -> np.ndarray:
    """Correlations of per-frame candidate lists (B, P, n) against (B, n) LLRs."""
    lam = np.clip(llrs, -_dec.LLR_CLAMP, _dec.LLR_CLAMP)
    return np.einsum("bpn,bn->bp", 1.0 - 2.0 * codewords.astype(np.float64), lam)


def _decode_batch(code, llrs, config: SimConfig, layer_perm):
    """Returns the decoded codewords (B, n) for the configured decoder."""
    if config.decoder == "sc":
        cw, _, _ = _dec.sc_decode_batch(code, llrs, layer_perm, config.min_sum)
        return cw
    if config.decoder == "scl":
        cw, _, _ = _dec.scl_decode_batch(code, llrs, config.list_size, layer_perm, config.min_sum)
        corr = _batch_correlations(cw, llrs)
        best = np.argmax(corr, axis=1)
        return np.take_along_axis(cw, best[:, None, None], axis=1)[:, 0, :]
    if config.decoder == "perm":
        stacks = []
        for perm in config.perms:
            c, _, _ = _dec.sc_decode_batch(code, llrs, perm, config.min_sum)
            stacks.append(c)
        cw = np.stack(stacks, axis=1)  # (B, P, n)
        corr = _batch_correlations(cw, llrs)
        best = np.argmax(corr, axis=1)
        return np.take_along_axis(cw, best[:, None, None], axis=1)[:, 0, :]
    if config.decoder == "ml":
        out = np.empty((llrs.shape[0], code.n), dtype=np.uint8)
        for i in range(llrs.shape[0]):
            out[i] = _dec.ml_decode_bruteforce(code, llrs[i]).codeword.to_array()
        return out
    raise AssertionError(config.decoder)


@dataclass
class _BatchCounts:
    frames: int = 0
    errors: int = 0
    ties: int = 0
    certified: int = 0


def _run_batch(code, channel, config: SimConfig, layer_perm, gen, rate, lo: int, hi: int) -> _BatchCounts:
    b = hi - lo
    k, n = gen.shape
    info = np.zeros((b, k), dtype=np.uint8)
    llrs = np.empty((b, n), dtype=np.float64)
    for i, f in enumerate(range(lo, hi)):
        rng = frame_rng(config.seed, f)
        if not config.all_zero:
            info[i] = rng.integers(0, 2, size=k, dtype=np.uint8)
        llrs[i] = transmit(channel, (info[i] @ gen) & 1, rng, rate)
    sent = (info @ gen) & 1
    decoded = _decode_batch(code, llrs, config, layer_perm)
    errs = (decoded != sent).any(axis=1)
    corr_dec = _batch_correlations(decoded[:, None, :], llrs)[:, 0]
    corr_sent = _batch_correlations(sent[:, None, :].astype(np.uint8), llrs)[:, 0]
    out = _BatchCounts(frames=b)
    out.errors = int(errs.sum())
    out.ties = int((errs & (corr_dec == corr_sent)).sum())
    out.certified = int((corr_dec >= corr_sent).sum())
    return out


def _resolve_perms(code, channel, config: SimConfig) -> SimConfig:
    if config.decoder != "perm" or config.perms is not None:
        return config
    from .channelconstruct import select_permutations

    sel = select_permutations(
        code, config.perm_count, channel, min_dist=config.min_dist, seed=config.seed
    )
    return replace(config, perms=sel.perms)


def simulate_fer(
    code: MonomialCode,
    channel: ChannelModel,
    config: SimConfig,
    layer_perm: Sequence[int] | None = None,
) -> SimResult:
    """Estimate the frame error rate until an error or frame budget is hit.

    The stopping rule is evaluated at batch boundaries; per-frame substreams
    make the outcome independent of batch size and worker count.
    """
    start = time.perf_counter()
    config = _resolve_perms(code, channel, config)
    gen = monomial_to_linear(code).generator_array()
    rate = code.k / code.n
    totals = _BatchCounts()

    def boundaries():
        lo = 0
        while lo < config.max_frames:
            hi = min(lo + config.batch, config.max_frames)
            yield lo, hi
            lo = hi

    def work(span):
        return _run_batch(code, channel, config, layer_perm, gen, rate, *span)

    stop_reason = "max_frames"
    if config.workers <= 1:
        for span in boundaries():
            counts = work(span)
            totals.frames += counts.frames
            totals.errors += counts.errors
            totals.ties += counts.ties
            totals.certified += counts.certified
            if totals.errors >= config.max_errors:
                stop_reason = "max_errors"
                break
    else:
        with ThreadPoolExecutor(max_workers=config.workers) as pool:
            pending = []
            spans = iter(boundaries())
            done = False
            while not done:
                while len(pending) < config.workers:
                    span = next(spans, None)
                    if span is None:
                        break
                    pending.append(pool.submit(work, span))
                if not pending:
                    break
                counts = pending.pop(0).result()
                totals.frames += counts.frames
                totals.errors += counts.errors
                totals.ties += counts.ties
                totals.certified += counts.certified
                if totals.errors >= config.max_errors:
                    stop_reason = "max_errors"
                    for fut in pending:
                        fut.cancel()
                    done = True

    lo, hi = wilson_interval(totals.errors, totals.frames)
    return SimResult(
        frames=totals.frames,
        errors=totals.errors,
        fer=totals.errors / totals.frames if totals.frames else 0.0,
        ml_certified=totals.certified / totals.frames if totals.frames else 0.0,
        ties=totals.ties,
        seed=config.seed,
        stop_reason=stop_reason,
        wall_seconds=time.perf_counter() - start,
        wilson_lo=lo,
        wilson_hi=hi,
    )


@dataclass(frozen=True)
class CurvePoint:
    channel: ChannelModel
    decoder: str
    size_label: str
    result: SimResult


def fer_curve(
    code: MonomialCode,
    channels: Sequence[ChannelModel],
    config: SimConfig,
    layer_perm: Sequence[int] | None = None,
) -> list[CurvePoint]:
    """One simulation per channel grid point."""
    if not channels:
        raise ValueError("channel grid is empty")
    points = []
    for ch in channels:
        cfg = _resolve_perms(code, ch, config)
        res = simulate_fer(code, ch, cfg, layer_perm)
        points.append(CurvePoint(ch, cfg.decoder, cfg.label(), res))
    return points
