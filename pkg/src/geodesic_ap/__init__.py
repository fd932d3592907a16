"""Prime geodesics of the modular surface counted in progressions of the trace."""

from .geodesics import (
    TraceTable,
    predicted_density,
    psi,
    psi_ap,
    psi_ap_zagier,
    psi_piece,
    psi_star,
)
from .quadratic import ClassCache, class_number, pell_fundamental, regulator

__all__ = [
    "ClassCache",
    "TraceTable",
    "class_number",
    "pell_fundamental",
    "predicted_density",
    "psi",
    "psi_ap",
    "psi_ap_zagier",
    "psi_piece",
    "psi_star",
    "regulator",
]
