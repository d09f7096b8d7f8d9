"""Code construction, encoding and CRC concatenation.

A code instance fixes the block length N = 2^n, the payload size K, a CRC and
the set of non-frozen positions.  The non-frozen set can come from a mask file
(see read_frozen_mask for the format) or from the built-in density-evolution
construction under a Gaussian approximation at a chosen design Eb/N0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .crc import CrcSpec, crc_matrix


@dataclass
class MessageWord:
    """Full N-bit message vector with its payload and CRC fields."""

    u: np.ndarray
    payload: np.ndarray
    crc_bits: np.ndarray


@dataclass
class PolarCode:
    """Immutable description of one code; safe to share across workers."""

    n: int
    N: int
    K: int
    crc: CrcSpec
    info_set: np.ndarray      # sorted indices of the K + crc.width non-frozen bits
    frozen_mask: np.ndarray   # bool, True where frozen
    # caches, derived in __post_init__
    _crc_mat: np.ndarray = field(init=False, repr=False)
    _crc_c0: np.ndarray = field(init=False, repr=False)
    _syn_mat: np.ndarray = field(init=False, repr=False)
    _frozen_u8: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = self.crc.width
        if self.info_set.size != self.K + c:
            raise ValueError("info set size must be K + crc width")
        if np.any(np.diff(self.info_set) <= 0):
            raise ValueError("info set must be strictly increasing")
        if self.info_set[0] < 0 or self.info_set[-1] >= self.N:
            raise ValueError("info set index out of range")
        if self.frozen_mask.sum() != self.N - self.info_set.size:
            raise ValueError("frozen mask inconsistent with info set")
        self._crc_mat, self._crc_c0 = crc_matrix(self.crc, self.K)
        # syndrome form over the K+c extracted bits: bits valid iff
        # (bits @ S) % 2 == s0, with S stacking the payload matrix over an
        # identity on the CRC field
        syn = np.zeros((self.K + c, c), dtype=np.uint8)
        syn[: self.K] = self._crc_mat
        syn[self.K :] = np.eye(c, dtype=np.uint8)
        self._syn_mat = syn
        self._frozen_u8 = np.ascontiguousarray(self.frozen_mask, dtype=np.uint8)

    @property
    def rate(self) -> float:
        return self.K / self.N

    def crc_of(self, payload: np.ndarray) -> np.ndarray:
        return (payload @ self._crc_mat % 2).astype(np.uint8) ^ self._crc_c0

    def check_u(self, u_hat: np.ndarray) -> bool:
        """CRC verdict over the non-frozen bits of a full estimate."""
        v = u_hat[self.info_set]
        syn = (v @ self._syn_mat % 2).astype(np.uint8)
        return bool(np.array_equal(syn, self._crc_c0))

    def extract_payload(self, u_hat: np.ndarray) -> np.ndarray:
        return u_hat[self.info_set[: self.K]].astype(np.uint8)


def polar_transform(bits: np.ndarray) -> np.ndarray:
    """Kronecker-power transform of [[1,0],[1,1]]; self-inverse over GF(2)."""
    x = np.ascontiguousarray(bits, dtype=np.uint8).copy()
    N = x.size
    h = 1
    while h < N:
        x = x.reshape(-1, 2 * h)
        x[:, :h] ^= x[:, h:]
        x = x.reshape(-1)
        h *= 2
    return x


def encode(code: PolarCode, payload) -> tuple[MessageWord, np.ndarray]:
    """Attach the CRC, place bits on the non-frozen positions and transform."""
    payload = np.asarray(payload, dtype=np.uint8)
    if payload.size != code.K:
        raise ValueError(f"payload must have {code.K} bits")
    crc_bits = code.crc_of(payload)
    u = np.zeros(code.N, dtype=np.uint8)
    u[code.info_set[: code.K]] = payload
    if code.crc.width:
        u[code.info_set[code.K :]] = crc_bits
    return MessageWord(u, payload, crc_bits), polar_transform(u)


def crc_check(code: PolarCode, u_hat) -> bool:
    u_hat = np.asarray(u_hat, dtype=np.uint8)
    if u_hat.size != code.N:
        raise ValueError("estimate length mismatch")
    return code.check_u(u_hat)


# ---------------------------------------------------------------------------
# density-evolution construction (Gaussian approximation)

_PHI_KNEE = 10.0


def _ln_phi(x: float) -> float:
    """log of the mean-LLR distortion function; decreasing in x."""
    if x <= _PHI_KNEE:
        return -0.4527 * x**0.86 + 0.0218
    return 0.5 * (math.log(math.pi) - math.log(x)) - x / 4.0 + math.log1p(-10.0 / (7.0 * x))


def _ln_phi_inverse(ln_y: float) -> float:
    if ln_y >= 0.0218:
        return 0.0
    x = ((0.0218 - ln_y) / 0.4527) ** (1.0 / 0.86)
    if x <= _PHI_KNEE:
        return x
    lo, hi = _PHI_KNEE, 2.0 * _PHI_KNEE
    while _ln_phi(hi) > ln_y:
        hi *= 2.0
        if hi > 1e12:
            break
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if _ln_phi(mid) > ln_y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_node(m: float) -> float:
    # mean update through a parity combination: phi(out) = 1 - (1 - phi(m))^2
    lp = _ln_phi(m)
    # ln(2*phi - phi^2) = ln(phi) + ln(2 - phi), stable for tiny phi
    ln_target = lp + math.log(2.0 - math.exp(lp))
    return _ln_phi_inverse(ln_target)


def ga_reliability(n: int, sigma2: float) -> np.ndarray:
    """Mean decision LLR of every bit position for an all-zero transmission.

    Walks the decoding tree from the channel downward: each round splits every
    partially polarized channel into its parity (worse) and repetition
    (better) children, so the most significant index bit is applied first.
    """
    means = np.array([2.0 / sigma2], dtype=float)
    for _ in range(n):
        out = np.empty(means.size * 2, dtype=float)
        out[0::2] = [_check_node(m) for m in means]
        out[1::2] = 2.0 * means
        means = out
    return means


def ga_frozen_mask(n: int, n_info: int, design_ebn0_db: float, rate: float) -> np.ndarray:
    """Frozen mask keeping the n_info most reliable positions."""
    from .channel import ebn0_to_sigma2

    N = 1 << n
    if not 0 <= n_info <= N:
        raise ValueError("info count out of range")
    means = ga_reliability(n, ebn0_to_sigma2(design_ebn0_db, rate))
    order = np.argsort(-means, kind="stable")
    mask = np.ones(N, dtype=bool)
    mask[order[:n_info]] = False
    return mask


# ---------------------------------------------------------------------------
# frozen-mask files: first line "N=<int>", then N characters, '1' = frozen

def parse_frozen_mask(text: str, name: str = "<mask>") -> np.ndarray:
    header, _, body = text.partition("\n")
    header = header.strip()
    if not header.startswith("N="):
        raise ValueError(f"{name}: expected first line 'N=<int>'")
    N = int(header[2:])
    chars = "".join(body.split())
    if len(chars) != N:
        raise ValueError(f"{name}: expected {N} mask characters, found {len(chars)}")
    if set(chars) - {"0", "1"}:
        raise ValueError(f"{name}: mask characters must be '0' or '1'")
    return np.frombuffer(chars.encode("ascii"), dtype=np.uint8) == ord("1")


def read_frozen_mask(path) -> np.ndarray:
    with open(path, "r", encoding="ascii") as fh:
        return parse_frozen_mask(fh.read(), str(path))


def write_frozen_mask(path, mask: np.ndarray) -> None:
    mask = np.asarray(mask, dtype=bool)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"N={mask.size}\n")
        fh.write("".join("1" if b else "0" for b in mask))
        fh.write("\n")


PACKAGED_FIXTURE = "p256_k128_crc24_ga2db.txt"


def packaged_mask_text() -> str:
    """Contents of the committed N=256 frozen-mask fixture."""
    from importlib import resources

    return resources.files("polarflip").joinpath(f"data/{PACKAGED_FIXTURE}").read_text()


def default_code(crc: CrcSpec | None = None) -> PolarCode:
    """The committed P(256,128) code with its 24-bit CRC."""
    from .crc import CRC24_POLY

    crc = crc if crc is not None else CrcSpec(24, CRC24_POLY)
    mask = parse_frozen_mask(packaged_mask_text(), PACKAGED_FIXTURE)
    K = int((~mask).sum()) - crc.width
    n = mask.size.bit_length() - 1
    return build_code(n, K, crc, mask=mask)


def build_code(
    n: int,
    K: int,
    crc: CrcSpec,
    *,
    mask: np.ndarray | None = None,
    mask_file=None,
    design_ebn0_db: float | None = None,
) -> PolarCode:
    """Construct a code from a frozen mask or the built-in GA construction.

    Exactly one of mask, mask_file or design_ebn0_db selects the frozen set.
    """
    N = 1 << n
    n_info = K + crc.width
    if n_info > N:
        raise ValueError(f"K + CRC width = {n_info} exceeds N = {N}")
    given = [mask is not None, mask_file is not None, design_ebn0_db is not None]
    if sum(given) != 1:
        raise ValueError("provide exactly one of mask, mask_file, design_ebn0_db")
    if mask_file is not None:
        mask = read_frozen_mask(mask_file)
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.size != N:
            raise ValueError(f"mask length {mask.size} does not match N = {N}")
        if (~mask).sum() != n_info:
            raise ValueError(
                f"mask frees {(~mask).sum()} positions, need K + c = {n_info}"
            )
    else:
        mask = ga_frozen_mask(n, n_info, design_ebn0_db, K / N)
    info_set = np.flatnonzero(~mask)
    return PolarCode(n=n, N=N, K=K, crc=crc, info_set=info_set, frozen_mask=mask)
