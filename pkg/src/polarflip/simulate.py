"""Monte Carlo FER sweeps with reproducible frame-indexed seeding.

Every frame draws its payload and noise from a counter-based stream keyed by
(master seed, frame index), so results are identical no matter how frames are
scheduled across workers.  Points stop at the first frame count that meets
both the minimum-frame and minimum-error targets; points that cannot reach
the error target within the frame cap are flagged as censored.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import ebn0_to_sigma2, frame_rng, transmit
from .code import PolarCode, encode
from .decoder import DscfConfig, dscf_decode
from .sc import ScWorkspace, genie_decode, sc_decode

_ROUND_FRAMES = 4096


@dataclass(frozen=True)
class ScSpec:
    pass


@dataclass(frozen=True)
class GenieSpec:
    max_order: int


@dataclass(frozen=True)
class DscfSpec:
    config: DscfConfig


DecoderSpec = ScSpec | GenieSpec | DscfSpec


@dataclass(frozen=True)
class SweepSpec:
    code: PolarCode
    ebn0_db: tuple[float, ...]
    decoder: DecoderSpec
    seed: int
    min_frames: int = 10_000
    min_frame_errors: int = 50
    max_frames: int = 1_000_000
    workers: int = 1

    def __post_init__(self):
        if self.min_frame_errors < 1:
            raise ValueError("min_frame_errors must be >= 1")
        if self.max_frames < self.min_frames:
            raise ValueError("max_frames must be >= min_frames")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class PointResult:
    ebn0_db: float
    frames: int
    frame_errors: int
    fer: float
    mean_attempts: float
    undetected: int
    censored: bool
    wall_time_s: float


@dataclass
class SweepResult:
    points: list[PointResult]


# worker-local state, set once per process by _worker_init
_WORKER: dict = {}


def _worker_init(code: PolarCode, dec: DecoderSpec, seed: int) -> None:
    _WORKER["code"] = code
    _WORKER["dec"] = dec
    _WORKER["seed"] = seed
    _WORKER["ws"] = ScWorkspace(code.n)


def _eval_frame(code, dec, seed, index, sigma2, ws):
    rng = frame_rng(seed, index)
    payload = rng.integers(0, 2, code.K, dtype=np.uint8)
    msg, x = encode(code, payload)
    frame = transmit(x, sigma2, rng)
    if isinstance(dec, ScSpec):
        trace = sc_decode(code, frame, None, ws)
        err = not np.array_equal(code.extract_payload(trace.u_hat), payload)
        return err, 1, err and code.check_u(trace.u_hat)
    if isinstance(dec, GenieSpec):
        ok, _ = genie_decode(code, frame, msg.u, dec.max_order, ws)
        return not ok, 1, False
    out = dscf_decode(code, frame, dec.config, ws)
    err = not np.array_equal(out.payload_hat, payload)
    return err, out.attempts, err and out.crc_pass


def _eval_range(args):
    sigma2, start, stop = args
    code, dec, seed, ws = _WORKER["code"], _WORKER["dec"], _WORKER["seed"], _WORKER["ws"]
    errs = np.zeros(stop - start, dtype=bool)
    atts = np.zeros(stop - start, dtype=np.int32)
    undet = np.zeros(stop - start, dtype=bool)
    for k, index in enumerate(range(start, stop)):
        errs[k], atts[k], undet[k] = _eval_frame(code, dec, seed, index, sigma2, ws)
    return errs, atts, undet


def _stop_index(err_cum: np.ndarray, spec: SweepSpec) -> int | None:
    """Smallest frame count >= min_frames reaching the error target, if any."""
    done = err_cum.size
    if done < spec.min_frames:
        return None
    pos = int(np.searchsorted(err_cum, spec.min_frame_errors, side="left"))
    if pos >= done:
        return None
    return max(pos + 1, spec.min_frames)


def _run_point(spec: SweepSpec, sigma2: float, submit) -> tuple[np.ndarray, np.ndarray, np.ndarray, bool]:
    errs = np.zeros(0, dtype=bool)
    atts = np.zeros(0, dtype=np.int32)
    undet = np.zeros(0, dtype=bool)
    done = 0
    while True:
        target = min(spec.max_frames, done + _ROUND_FRAMES)
        bounds = np.linspace(done, target, spec.workers + 1).astype(int)
        chunks = [(sigma2, int(a), int(b)) for a, b in zip(bounds, bounds[1:]) if a < b]
        for e, a, u in submit(chunks):
            errs = np.concatenate([errs, e])
            atts = np.concatenate([atts, a])
            undet = np.concatenate([undet, u])
        done = target
        stop = _stop_index(np.cumsum(errs), spec)
        if stop is not None:
            return errs[:stop], atts[:stop], undet[:stop], False
        if done >= spec.max_frames:
            return errs, atts, undet, True


def run_sweep(spec: SweepSpec) -> SweepResult:
    """FER / attempts sweep over the configured Eb/N0 points."""
    points = []

    def run_all(submit):
        for ebn0 in spec.ebn0_db:
            sigma2 = ebn0_to_sigma2(ebn0, spec.code.rate)
            t0 = time.perf_counter()
            errs, atts, undet, censored = _run_point(spec, sigma2, submit)
            wall = time.perf_counter() - t0
            frames = errs.size
            n_err = int(errs.sum())
            points.append(PointResult(
                ebn0_db=ebn0,
                frames=frames,
                frame_errors=n_err,
                fer=n_err / frames,
                mean_attempts=float(atts.sum()) / frames,
                undetected=int(undet.sum()),
                censored=censored,
                wall_time_s=wall,
            ))

    if spec.workers == 1:
        _worker_init(spec.code, spec.decoder, spec.seed)
        run_all(lambda chunks: map(_eval_range, chunks))
    else:
        with ProcessPoolExecutor(
            max_workers=spec.workers,
            initializer=_worker_init,
            initargs=(spec.code, spec.decoder, spec.seed),
        ) as pool:
            run_all(lambda chunks: pool.map(_eval_range, chunks))
    return SweepResult(points)


CSV_HEADER = "ebn0_db,frames,frame_errors,fer,mean_attempts,undetected,censored"


def emit_csv(result: SweepResult, path) -> None:
    """One row per swept point; format is fixed so reruns are byte-identical."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(CSV_HEADER + "\n")
        for p in result.points:
            fh.write(
                f"{p.ebn0_db:.10g},{p.frames},{p.frame_errors},{p.fer:.10g},"
                f"{p.mean_attempts:.10g},{p.undetected},{int(p.censored)}\n"
            )


# ---------------------------------------------------------------------------
# single-frame inspection

@dataclass
class DecodeReport:
    source: str
    attempts: list          # (indices, metric, crc_pass) per attempt
    crc_pass: bool
    u_hat: np.ndarray
    payload_hat: np.ndarray
    trace_dump: np.ndarray  # columns: index, frozen, decision_llr, t, u_hat
    payload_match: bool | None


def read_llr_file(path, N: int) -> np.ndarray:
    values = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                values.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: not a number: {line!r}") from exc
    if len(values) != N:
        raise ValueError(f"{path}: expected {N} LLR lines, found {len(values)}")
    return np.array(values)


def decode_one(code: PolarCode, dec: DecoderSpec, *, seed: int | None = None,
               frame_index: int = 0, ebn0_db: float | None = None,
               llr_file=None) -> DecodeReport:
    """Decode one frame from a seeded channel draw or a file of LLRs."""
    payload = None
    if llr_file is not None:
        frame = read_llr_file(llr_file, code.N)
        source = f"llr-file:{llr_file}"
    else:
        if seed is None or ebn0_db is None:
            raise ValueError("seeded decode needs both seed and ebn0_db")
        rng = frame_rng(seed, frame_index)
        payload = rng.integers(0, 2, code.K, dtype=np.uint8)
        _, x = encode(code, payload)
        frame = transmit(x, ebn0_to_sigma2(ebn0_db, code.rate), rng)
        source = f"seed:{seed}/{frame_index}@{ebn0_db:g}dB"

    ws = ScWorkspace(code.n)
    if isinstance(dec, ScSpec):
        trace = sc_decode(code, frame, None, ws)
        ok = code.check_u(trace.u_hat)
        attempts = [((), None, ok)]
    elif isinstance(dec, DscfSpec):
        out = dscf_decode(code, frame, dec.config, ws)
        trace = out.final_trace
        ok = out.crc_pass
        attempts = [(rec.flip_set.indices, rec.flip_set.metric, rec.crc_pass)
                    for rec in out.history]
    else:
        raise ValueError("decode_one supports the sc and dscf decoders")

    u_hat = trace.u_hat
    dump = np.column_stack([
        np.arange(code.N),
        code.frozen_mask.astype(int),
        trace.decision_llrs,
        trace.flip_vector,
        u_hat,
    ])
    return DecodeReport(
        source=source,
        attempts=attempts,
        crc_pass=ok,
        u_hat=u_hat,
        payload_hat=code.extract_payload(u_hat),
        trace_dump=dump,
        payload_match=None if payload is None else bool(
            np.array_equal(code.extract_payload(u_hat), payload)),
    )


def write_trace_csv(report: DecodeReport, path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("index,frozen,decision_llr,t,u_hat\n")
        for row in report.trace_dump:
            fh.write(f"{int(row[0])},{int(row[1])},{row[2]:.10g},{int(row[3])},{int(row[4])}\n")
