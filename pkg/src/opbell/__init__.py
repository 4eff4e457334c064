"""Numerical verification of operator Bellman-type inequalities on small
real symmetric matrices."""
from ._backend import BACKEND
from .checks import CHECK_IDS, CheckReport, Instance, Verdict
from .constants import beta, beta_tilde, kantorovich
from .functions import Affine, Exp, IntervalBounds, Power, PowerOneMinus, Tabulated
from .matcore import apply_function, loewner_compare, spectral_decompose

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CHECK_IDS",
    "Affine",
    "CheckReport",
    "Exp",
    "Instance",
    "IntervalBounds",
    "Power",
    "PowerOneMinus",
    "Tabulated",
    "Verdict",
    "apply_function",
    "beta",
    "beta_tilde",
    "kantorovich",
    "loewner_compare",
    "spectral_decompose",
]
