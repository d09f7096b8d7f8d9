"""Command-line front end: simulate, train, decode and construct subcommands.

Options can come from a plain key=value config file (keys are the long flag
names without the leading dashes); explicit flags override the file.
"""

from __future__ import annotations

import argparse
import hashlib
import sys

from .code import (
    build_code,
    ga_frozen_mask,
    packaged_mask_text,
    parse_frozen_mask,
    write_frozen_mask,
)
from .crc import CRC24_POLY, CrcSpec
from .decoder import DscfConfig
from .metrics import parse_metric
from .simulate import (
    DscfSpec,
    GenieSpec,
    ScSpec,
    SweepSpec,
    decode_one,
    emit_csv,
    run_sweep,
    write_trace_csv,
)
from .training import TrainConfig, train_beta, write_beta_report

BUILTIN_CODE = "builtin"


def _fixture_text(code_arg: str) -> str:
    if code_arg == BUILTIN_CODE:
        return packaged_mask_text()
    with open(code_arg, "r", encoding="ascii") as fh:
        return fh.read()


def _parse_crc(spec: str) -> CrcSpec:
    if spec.strip().lower() == "none":
        return CrcSpec(0, 1)
    poly_s, _, width_s = spec.partition(":")
    if not width_s:
        raise ValueError("CRC spec must look like 0x1864CFB:24 or 'none'")
    return CrcSpec(int(width_s), int(poly_s, 16))


def _load_code(code_arg: str, crc: CrcSpec):
    text = _fixture_text(code_arg)
    mask = parse_frozen_mask(text, code_arg)
    N = mask.size
    n = N.bit_length() - 1
    if 1 << n != N:
        raise ValueError("fixture N must be a power of two")
    K = int((~mask).sum()) - crc.width
    if K < 1:
        raise ValueError("mask leaves no payload bits after the CRC")
    return build_code(n, K, crc, mask=mask), hashlib.sha256(text.encode()).hexdigest()


def _parse_ebn0(arg: str) -> tuple[float, ...]:
    points = tuple(float(v) for v in arg.split(",") if v)
    if not points:
        raise ValueError("empty Eb/N0 list")
    return points


def _decoder_spec(args) -> ScSpec | GenieSpec | DscfSpec:
    name = args.decoder.lower()
    if name == "sc":
        return ScSpec()
    if name == "genie":
        return GenieSpec(args.omega)
    if name == "dscf":
        metric = parse_metric(args.metric)
        return DscfSpec(DscfConfig(args.omega, args.attempts, metric))
    raise ValueError(f"unknown decoder {args.decoder!r}")


def _config_argv(path) -> list[str]:
    argv = []
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            if not eq:
                raise ValueError(f"{path}:{lineno}: expected key=value")
            argv += [f"--{key.strip()}", value.strip()]
    return argv


def _add_common(p):
    p.add_argument("--code", default=BUILTIN_CODE,
                   help="frozen-mask fixture file, or 'builtin'")
    p.add_argument("--crc", default=f"0x{CRC24_POLY:X}:24",
                   help="hex generator:width, or 'none'")
    p.add_argument("--seed", type=int, default=1)


def _add_decoder(p):
    p.add_argument("--decoder", default="dscf", help="sc | genie | dscf")
    p.add_argument("--metric", default="alpha-exact:0.3367",
                   help="alpha-exact:<a> | alpha-relu | beta-exact:<b1,..> | beta-relu:<b1,..>")
    p.add_argument("--omega", type=int, default=2, help="maximum flip order")
    p.add_argument("--attempts", type=int, default=8,
                   help="extra SC attempts after the initial pass")


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="polarflip")
    top.add_argument("--config", default=None, help="key=value file of defaults")
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="FER / attempts sweep to CSV")
    _add_common(p)
    _add_decoder(p)
    p.add_argument("--ebn0", required=True, help="comma-separated dB list")
    p.add_argument("--min-frames", type=int, default=10_000)
    p.add_argument("--min-errors", type=int, default=50)
    p.add_argument("--max-frames", type=int, default=1_000_000)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="output CSV path")

    p = sub.add_parser("train", help="fit the additive metric offsets")
    _add_common(p)
    p.add_argument("--form", default="exact", help="exact | relu")
    p.add_argument("--ebn0", default="2,3,4,5")
    p.add_argument("--samples-per-point", type=int, default=250_000)
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--beta-range", default="0.01:10")
    p.add_argument("--omega", type=int, default=2)
    p.add_argument("--out", required=True, help="report file path")

    p = sub.add_parser("decode", help="decode one frame and print the attempt log")
    _add_common(p)
    _add_decoder(p)
    p.add_argument("--ebn0", type=float, default=None, help="channel Eb/N0 in dB")
    p.add_argument("--frame-index", type=int, default=0)
    p.add_argument("--llr-file", default=None, help="file of N LLRs, one per line")
    p.add_argument("--trace-csv", default=None, help="dump the final trace as CSV")

    p = sub.add_parser("construct", help="write a frozen-mask fixture file")
    p.add_argument("--n", type=int, required=True, help="log2 of the block length")
    p.add_argument("--k", type=int, required=True, help="payload bits")
    p.add_argument("--crc", default=f"0x{CRC24_POLY:X}:24")
    p.add_argument("--design-ebn0", type=float, default=2.0)
    p.add_argument("--out", required=True)
    return top


def _cmd_simulate(args) -> int:
    code, _ = _load_code(args.code, _parse_crc(args.crc))
    spec = SweepSpec(
        code=code,
        ebn0_db=_parse_ebn0(args.ebn0),
        decoder=_decoder_spec(args),
        seed=args.seed,
        min_frames=args.min_frames,
        min_frame_errors=args.min_errors,
        max_frames=args.max_frames,
        workers=args.workers,
    )
    result = run_sweep(spec)
    emit_csv(result, args.out)
    for p in result.points:
        flag = " censored" if p.censored else ""
        print(f"{p.ebn0_db:g} dB: fer={p.fer:.3e} ({p.frame_errors}/{p.frames}) "
              f"attempts={p.mean_attempts:.4f} undetected={p.undetected} "
              f"[{p.wall_time_s:.1f}s]{flag}")
    return 0


def _cmd_train(args) -> int:
    code, digest = _load_code(args.code, _parse_crc(args.crc))
    lo, _, hi = args.beta_range.partition(":")
    cfg = TrainConfig(
        ebn0_points_db=_parse_ebn0(args.ebn0),
        samples_per_point=args.samples_per_point,
        epochs=args.epochs,
        batch_size=args.batch_size,
        beta_init_range=(float(lo), float(hi)),
        metric_form=args.form,
        max_order=args.omega,
        seed=args.seed,
    )
    beta, history = train_beta(code, cfg)
    write_beta_report(args.out, cfg, beta, history, digest)
    print("beta:", ",".join(f"{b:.3f}" for b in beta),
          f"(loss {history[-1].lambda_hat:.6g})")
    return 0


def _cmd_decode(args) -> int:
    code, _ = _load_code(args.code, _parse_crc(args.crc))
    dec = _decoder_spec(args)
    if isinstance(dec, GenieSpec):
        raise ValueError("decode supports the sc and dscf decoders")
    report = decode_one(
        code, dec,
        seed=None if args.llr_file else args.seed,
        frame_index=args.frame_index,
        ebn0_db=args.ebn0,
        llr_file=args.llr_file,
    )
    print(f"frame {report.source}")
    for k, (indices, metric, ok) in enumerate(report.attempts, start=1):
        flips = ",".join(str(i) for i in indices) or "-"
        score = f" metric={metric:.6g}" if metric is not None else ""
        print(f"attempt {k}: flips=[{flips}]{score} crc={'pass' if ok else 'fail'}")
    if report.payload_match is not None:
        print("payload", "recovered" if report.payload_match else "wrong")
    if args.trace_csv:
        write_trace_csv(report, args.trace_csv)
    return 0


def _cmd_construct(args) -> int:
    crc = _parse_crc(args.crc)
    n_info = args.k + crc.width
    mask = ga_frozen_mask(args.n, n_info, args.design_ebn0, args.k / (1 << args.n))
    write_frozen_mask(args.out, mask)
    print(f"wrote N={1 << args.n} mask with {n_info} open positions to {args.out}")
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "train": _cmd_train,
    "decode": _cmd_decode,
    "construct": _cmd_construct,
}


def _apply_config(argv: list[str]) -> list[str]:
    """Expand --config FILE into flags placed right after the subcommand."""
    if "--config" not in argv:
        return argv
    at = argv.index("--config")
    if at + 1 >= len(argv):
        raise ValueError("--config needs a file path")
    injected = _config_argv(argv[at + 1])
    rest = argv[:at] + argv[at + 2 :]
    for pos, token in enumerate(rest):
        if not token.startswith("-"):
            # explicit flags come after the injected ones, so they win
            return rest[: pos + 1] + injected + rest[pos + 1 :]
    raise ValueError("--config requires a subcommand")


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(_apply_config(argv))
        return _COMMANDS[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
