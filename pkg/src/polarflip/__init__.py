"""Polar code SC / SC-flip decoding with trainable flip metrics."""

from ._backend import name as backend_name
from .channel import LlrFrame, ebn0_to_sigma2, frame_rng, transmit
from .code import (
    MessageWord,
    PolarCode,
    build_code,
    crc_check,
    default_code,
    encode,
    packaged_mask_text,
    polar_transform,
    read_frozen_mask,
    write_frozen_mask,
)
from .crc import CRC24_POLY, CrcSpec
from .decoder import AttemptRecord, DecodeOutcome, DscfConfig, build_flip_vector, dscf_decode
from .metrics import (
    EMPTY_FLIP_SET,
    AlphaExact,
    AlphaRelu,
    BetaExact,
    BetaRelu,
    FlipSet,
    MetricKind,
    format_metric,
    p_estimate,
    parse_metric,
    q_alpha_exact,
    q_alpha_relu,
    q_beta_exact,
    q_beta_relu,
    select_candidates,
    softplus,
)
from .sc import ScTrace, ScWorkspace, f, g, genie_decode, sc_decode
from .simulate import (
    DscfSpec,
    GenieSpec,
    PointResult,
    ScSpec,
    SweepResult,
    SweepSpec,
    decode_one,
    emit_csv,
    run_sweep,
)
from .training import (
    LossRecord,
    TrainConfig,
    first_error_penalty,
    frame_loss,
    make_training_set,
    train_beta,
    write_beta_report,
)

__version__ = "0.1.0"

__all__ = [
    "AlphaExact",
    "AlphaRelu",
    "AttemptRecord",
    "BetaExact",
    "BetaRelu",
    "CRC24_POLY",
    "CrcSpec",
    "DecodeOutcome",
    "DscfConfig",
    "DscfSpec",
    "EMPTY_FLIP_SET",
    "FlipSet",
    "GenieSpec",
    "LlrFrame",
    "LossRecord",
    "MessageWord",
    "MetricKind",
    "PointResult",
    "PolarCode",
    "ScSpec",
    "ScTrace",
    "ScWorkspace",
    "SweepResult",
    "SweepSpec",
    "TrainConfig",
    "backend_name",
    "build_code",
    "build_flip_vector",
    "crc_check",
    "decode_one",
    "default_code",
    "dscf_decode",
    "packaged_mask_text",
    "ebn0_to_sigma2",
    "emit_csv",
    "encode",
    "f",
    "first_error_penalty",
    "format_metric",
    "frame_loss",
    "frame_rng",
    "g",
    "genie_decode",
    "make_training_set",
    "p_estimate",
    "parse_metric",
    "polar_transform",
    "q_alpha_exact",
    "q_alpha_relu",
    "q_beta_exact",
    "q_beta_relu",
    "read_frozen_mask",
    "run_sweep",
    "sc_decode",
    "select_candidates",
    "softplus",
    "train_beta",
    "transmit",
    "write_beta_report",
    "write_frozen_mask",
]
