"""End-to-end latency budgets implied by the local timing properties."""

from __future__ import annotations

from typing import NamedTuple, Optional

from ..patterns.params import INI_EXE, PUB_SUB, REQ_RES, SEN_REC


class Bound(NamedTuple):
    value: int
    formula: str
    diagnostic: Optional[str] = None


_FORMULAS = {
    PUB_SUB: ("R_pub - R_sub - L_pub", lambda p: p.R_pub - p.R_sub - p.L_pub),
    REQ_RES: ("L_req + R_req - L_res - R_res", lambda p: p.L_req + p.R_req - p.L_res - p.R_res),
    INI_EXE: ("L_ini - L_exe", lambda p: p.L_ini - p.L_exe),
    SEN_REC: ("L_sen - L_rec", lambda p: p.L_sen - p.L_rec),
}


def requirement_bound(kind, params) -> Bound:
    """Largest substrate latency (summed over both legs for two-way patterns)
    that the local properties of ``params`` can tolerate.

    A negative value is returned unchanged, with a diagnostic saying that no
    substrate can meet it.
    """
    try:
        formula, fn = _FORMULAS[kind]
    except KeyError:
        raise ValueError(f"unknown pattern kind {kind!r}") from None
    value = fn(params)
    diag = None
    if value < 0:
        diag = f"{kind}: budget {formula} = {value} is negative, no substrate latency satisfies it"
    return Bound(value, formula, diag)
