"""Pattern parameters, substrate configuration and failure kinds."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field, fields
from typing import Optional

PUB_SUB = "pub-sub"
REQ_RES = "req-res"
INI_EXE = "ini-exe"
SEN_REC = "sen-rec"
KINDS = (PUB_SUB, REQ_RES, INI_EXE, SEN_REC)


class PatternParamError(ValueError):
    pass


class FailureKind(str, enum.Enum):
    FAST_PUBLICATION = "fastPublication"
    TIMEOUT = "timeout"
    STALE_DATA = "staleData"
    SLOW_PUBLICATION = "slowPublication"
    SLOW_CONSUMPTION = "slowConsumption"
    FAST_REQUEST = "fastRequest"
    EXCESS_LOAD = "excessLoad"
    DATA_UNAVAILABLE = "dataUnavailable"
    FAST_INIT = "fastInit"
    FAST_SEND = "fastSend"

    @property
    def message(self):
        """Name of the message server that announces this failure."""
        return f"{self.value}Failure"

    @classmethod
    def from_message(cls, msg_name):
        if msg_name.endswith("Failure"):
            try:
                return cls(msg_name[: -len("Failure")])
            except ValueError:
                return None
        return None


class _Params:
    KIND = ""

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise PatternParamError(f"{f.name} must be a nonnegative integer, got {v!r}")

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class PubSubParams(_Params):
    N_pub: int
    L_pub: int
    R_pub: int
    N_sub: int
    X_sub: int
    L_sub: int
    R_sub: int
    KIND = PUB_SUB

    def __post_init__(self):
        super().__post_init__()
        if self.R_pub < self.R_sub:
            raise PatternParamError(
                f"R_pub={self.R_pub} < R_sub={self.R_sub}: every delivery would be stale"
            )
        if self.R_pub - self.R_sub - self.L_pub < 0:
            warnings.warn(
                f"publish-subscribe budget R_pub-R_sub-L_pub={self.R_pub - self.R_sub - self.L_pub} is negative",
                stacklevel=3,
            )


@dataclass(frozen=True)
class ReqResParams(_Params):
    N_req: int
    L_req: int
    R_req: int
    N_res: int
    L_res: int
    R_res: int
    KIND = REQ_RES


@dataclass(frozen=True)
class IniExeParams(_Params):
    N_ini: int
    L_ini: int
    N_exe: int
    L_exe: int
    KIND = INI_EXE


@dataclass(frozen=True)
class SenRecParams(_Params):
    N_sen: int
    L_sen: int
    N_rec: int
    L_rec: int
    KIND = SEN_REC


PARAM_TYPES = {
    PUB_SUB: PubSubParams,
    REQ_RES: ReqResParams,
    INI_EXE: IniExeParams,
    SEN_REC: SenRecParams,
}


def make_params(kind, values: dict):
    cls = PARAM_TYPES.get(kind)
    if cls is None:
        raise PatternParamError(f"unknown pattern kind {kind!r}")
    names = {f.name for f in fields(cls)}
    unknown = set(values) - names
    missing = names - set(values)
    if unknown or missing:
        raise PatternParamError(
            f"{kind} parameters: unknown {sorted(unknown)}, missing {sorted(missing)}"
        )
    return cls(**values)


# ---------------------------------------------------------------- substrate

EQUAL_DELAYS = "EQUAL_DELAYS"
PER_PATTERN_DELAYS = "PER_PATTERN_DELAYS"
PRIORITIZED = "PRIORITIZED"
VARIANTS = (EQUAL_DELAYS, PER_PATTERN_DELAYS, PRIORITIZED)

DEFAULT_DELAYS = (1, 2)

# PRIORITIZED: publish-subscribe traffic first, everything else after it
DEFAULT_PRIORITIES = {
    "transmitPublish": 1,
    "transmitRequest": 2,
    "transmitResponse": 2,
    "transmitInitiate": 2,
    "transmitSend": 2,
    "transmitAck": 2,
    "transmitReceipt": 2,
}


@dataclass(frozen=True)
class Delays:
    """Nondeterministic value sets for the three delay kinds of one pattern."""

    client: tuple = DEFAULT_DELAYS
    net: tuple = DEFAULT_DELAYS
    service: tuple = DEFAULT_DELAYS

    def __post_init__(self):
        for name in ("client", "net", "service"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise PatternParamError(f"{name} delay list must be nonempty")
            if any(not isinstance(v, int) or isinstance(v, bool) or v < 0 for v in vals):
                raise PatternParamError(f"{name} delays must be nonnegative integers: {vals!r}")
            object.__setattr__(self, name, vals)


@dataclass(frozen=True)
class SubstrateConfig:
    """How the shared substrate delays and orders traffic.

    ``per_pattern`` overrides the default delays for a pattern kind or for a
    single pattern instance (keyed by its prefix); it is only consulted by
    the ``PER_PATTERN_DELAYS`` variant. Substrate (net) delays are always
    taken per kind because one substrate server serves every instance of a
    kind. ``priorities`` maps substrate message servers to their priority
    (``PRIORITIZED`` only).
    """

    variant: str = EQUAL_DELAYS
    delays: Delays = field(default_factory=Delays)
    per_pattern: tuple = ()  # ((kind, Delays), ...)
    priorities: Optional[tuple] = None  # ((msg, priority), ...)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise PatternParamError(f"unknown substrate variant {self.variant!r}")
        if isinstance(self.per_pattern, dict):
            object.__setattr__(self, "per_pattern", tuple(sorted(self.per_pattern.items())))
        if isinstance(self.priorities, dict):
            object.__setattr__(self, "priorities", tuple(sorted(self.priorities.items())))

    def delays_for(self, kind, instance=None) -> Delays:
        """Delays for a pattern instance; per-instance entries beat per-kind ones."""
        if self.variant == PER_PATTERN_DELAYS:
            table = dict(self.per_pattern)
            if instance is not None and instance in table:
                return table[instance]
            return table.get(kind, self.delays)
        return self.delays

    def priority_of(self, msg):
        if self.variant != PRIORITIZED:
            return 0
        table = dict(self.priorities) if self.priorities is not None else DEFAULT_PRIORITIES
        return table.get(msg, 0)
