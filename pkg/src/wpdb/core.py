"""Value types and the counter-based random stream shared by every module.

Random numbers come from Philox4x32-10 (Salmon et al., SC'11), keyed by the
64-bit master seed.  The 128-bit counter holds ``(block, stream_index)``, so
the sample at any ``(master_seed, stream_index, block)`` is a pure function
of those three integers.  Every draw consumes exactly one block, which yields
two uniforms on the open interval (0, 1) and, via Box-Muller, two independent
standard normals.  Substreams therefore never overlap and can be evaluated in
any order, by any number of workers, with bit-identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import InvalidParameterError

__all__ = [
    "ComplexGain",
    "SystemParams",
    "RngStream",
    "substream",
    "draw_cn01",
    "draw_cn01_array",
    "draw_phase_error",
    "draw_phase_error_array",
    "philox4x32",
]

_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_SHIFT11 = np.uint64(11)
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_TWO_POW_M53 = 2.0**-53
_TWO_PI = 2.0 * math.pi
_U64_MAX = (1 << 64) - 1


@numba.njit(cache=True, nogil=True, inline="always")
def _philox_round(c0, c1, c2, c3, k0, k1):
    p0 = _M0 * c0
    p1 = _M1 * c2
    hi0 = p0 >> _SHIFT32
    lo0 = p0 & _MASK32
    hi1 = p1 >> _SHIFT32
    lo1 = p1 & _MASK32
    return (hi1 ^ c1 ^ k0) & _MASK32, lo1, (hi0 ^ c3 ^ k1) & _MASK32, lo0


@numba.njit(cache=True, nogil=True)
def philox4x32(c0, c1, c2, c3, k0, k1):
    """Philox4x32-10 bijection. All words are uint64 holding 32-bit values."""
    for _ in range(9):
        c0, c1, c2, c3 = _philox_round(c0, c1, c2, c3, k0, k1)
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return _philox_round(c0, c1, c2, c3, k0, k1)


@numba.njit(cache=True, nogil=True, inline="always")
def _block_uniforms(k0, k1, s0, s1, block):
    r0, r1, r2, r3 = philox4x32(
        block & _MASK32, block >> _SHIFT32, s0, s1, k0, k1
    )
    u1 = (float(((r0 << _SHIFT32) | r1) >> _SHIFT11) + 0.5) * _TWO_POW_M53
    u2 = (float(((r2 << _SHIFT32) | r3) >> _SHIFT11) + 0.5) * _TWO_POW_M53
    return u1, u2


@numba.njit(cache=True, nogil=True, inline="always")
def _block_cn01(k0, k1, s0, s1, block):
    """CN(0,1) sample from one block: each component has variance 1/2."""
    u1, u2 = _block_uniforms(k0, k1, s0, s1, block)
    r = math.sqrt(-math.log(u1))
    a = _TWO_PI * u2
    return r * math.cos(a), r * math.sin(a)


@numba.njit(cache=True, nogil=True, inline="always")
def _block_normal(k0, k1, s0, s1, block):
    """Standard normal from one block (cosine branch of Box-Muller)."""
    u1, u2 = _block_uniforms(k0, k1, s0, s1, block)
    return math.sqrt(-2.0 * math.log(u1)) * math.cos(_TWO_PI * u2)


@numba.njit(cache=True, nogil=True)
def _fill_cn01(k0, k1, s0, s1, first_block, out_re, out_im):
    for i in range(out_re.shape[0]):
        out_re[i], out_im[i] = _block_cn01(k0, k1, s0, s1, first_block + np.uint64(i))


@numba.njit(cache=True, nogil=True)
def _fill_normal(k0, k1, s0, s1, first_block, out):
    for i in range(out.shape[0]):
        out[i] = _block_normal(k0, k1, s0, s1, first_block + np.uint64(i))


def _split64(value: int) -> tuple[np.uint64, np.uint64]:
    return np.uint64(value & 0xFFFFFFFF), np.uint64(value >> 32)


def _check_u64(name: str, value: int) -> int:
    value = int(value)
    if not 0 <= value <= _U64_MAX:
        raise InvalidParameterError(f"{name} must fit in 64 unsigned bits, got {value}")
    return value


@dataclass(frozen=True)
class ComplexGain:
    """A complex baseband coefficient stored as real and imaginary parts."""

    re: float
    im: float

    def magnitude(self) -> float:
        return math.hypot(self.re, self.im)

    def phase(self) -> float:
        # atan2 returns [-pi, pi]; fold -pi onto pi to keep (-pi, pi]
        angle = math.atan2(self.im, self.re)
        return math.pi if angle == -math.pi else angle

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def from_complex(cls, z: complex) -> "ComplexGain":
        return cls(float(z.real), float(z.imag))

    @classmethod
    def from_polar(cls, magnitude: float, phase: float) -> "ComplexGain":
        return cls(magnitude * math.cos(phase), magnitude * math.sin(phase))


@dataclass(frozen=True)
class SystemParams:
    """Physical parameters of the relay network.

    Attributes:
        n_relays: number of cooperating relays N.
        source_power: source transmit power P_S in linear watts.
        eta: RF-to-DC conversion efficiency in [0, 1].
        sigma_theta_sq: variance of the per-relay phase error in rad^2.
        noise_var: destination noise variance in linear watts.
    """

    n_relays: int
    source_power: float
    eta: float
    sigma_theta_sq: float
    noise_var: float = 1.0

    def __post_init__(self) -> None:
        if isinstance(self.n_relays, bool) or int(self.n_relays) != self.n_relays or self.n_relays < 1:
            raise InvalidParameterError(f"n_relays must be a positive integer, got {self.n_relays!r}")
        if not (self.source_power > 0 and math.isfinite(self.source_power)):
            raise InvalidParameterError(f"source_power must be > 0, got {self.source_power!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise InvalidParameterError(f"eta must lie in [0, 1], got {self.eta!r}")
        if not (self.sigma_theta_sq >= 0 and math.isfinite(self.sigma_theta_sq)):
            raise InvalidParameterError(f"sigma_theta_sq must be >= 0, got {self.sigma_theta_sq!r}")
        if not (self.noise_var > 0 and math.isfinite(self.noise_var)):
            raise InvalidParameterError(f"noise_var must be > 0, got {self.noise_var!r}")
        object.__setattr__(self, "n_relays", int(self.n_relays))


class RngStream:
    """One independent random stream identified by ``(master_seed, stream_index)``.

    The stream keeps a block cursor; each draw consumes one block.  A stream
    must not be shared between workers, but two streams with equal identity
    and cursor always produce the same samples.
    """

    __slots__ = ("master_seed", "stream_index", "block", "_key", "_ctr")

    def __init__(self, master_seed: int, stream_index: int, block: int = 0) -> None:
        self.master_seed = _check_u64("master_seed", master_seed)
        self.stream_index = _check_u64("stream_index", stream_index)
        self.block = _check_u64("block", block)
        self._key = _split64(self.master_seed)
        self._ctr = _split64(self.stream_index)

    def __repr__(self) -> str:
        return (
            f"RngStream(master_seed={self.master_seed}, "
            f"stream_index={self.stream_index}, block={self.block})"
        )

    def _take(self, count: int) -> np.uint64:
        if count < 0:
            raise InvalidParameterError(f"count must be >= 0, got {count}")
        first = self.block
        if first + count > _U64_MAX:
            raise InvalidParameterError("stream exhausted")
        self.block = first + count
        return np.uint64(first)

    def cn01(self, size: int) -> tuple[np.ndarray, np.ndarray]:
        """Consume ``size`` blocks and return real and imaginary parts of CN(0,1) draws."""
        first = self._take(size)
        re = np.empty(size)
        im = np.empty(size)
        _fill_cn01(*self._key, *self._ctr, first, re, im)
        return re, im

    def normal(self, size: int) -> np.ndarray:
        """Consume ``size`` blocks and return standard normal draws."""
        first = self._take(size)
        out = np.empty(size)
        _fill_normal(*self._key, *self._ctr, first, out)
        return out


def substream(master_seed: int, trial_index: int) -> RngStream:
    """Return the stream reserved for one Monte-Carlo trial."""
    return RngStream(master_seed, trial_index)


def draw_cn01(rng: RngStream) -> ComplexGain:
    """Draw one circularly-symmetric complex Gaussian with unit total variance."""
    re, im = rng.cn01(1)
    return ComplexGain(float(re[0]), float(im[0]))


def draw_cn01_array(rng: RngStream, size: int) -> np.ndarray:
    """Vectorised :func:`draw_cn01`; returns a complex128 array of ``size`` draws."""
    re, im = rng.cn01(size)
    return re + 1j * im


def _check_variance(sigma_theta_sq: float) -> float:
    if not (sigma_theta_sq >= 0 and math.isfinite(sigma_theta_sq)):
        raise InvalidParameterError(f"phase-error variance must be >= 0, got {sigma_theta_sq!r}")
    return float(sigma_theta_sq)


def draw_phase_error(rng: RngStream, sigma_theta_sq: float) -> float:
    """Draw an unwrapped N(0, sigma_theta_sq) phase error in radians.

    A zero variance still consumes a block and returns exactly 0.0.
    """
    sigma_theta_sq = _check_variance(sigma_theta_sq)
    z = float(rng.normal(1)[0])
    if sigma_theta_sq == 0.0:
        return 0.0
    return math.sqrt(sigma_theta_sq) * z


def draw_phase_error_array(rng: RngStream, sigma_theta_sq: float, size: int) -> np.ndarray:
    sigma_theta_sq = _check_variance(sigma_theta_sq)
    z = rng.normal(size)
    if sigma_theta_sq == 0.0:
        return np.zeros(size)
    return math.sqrt(sigma_theta_sq) * z
