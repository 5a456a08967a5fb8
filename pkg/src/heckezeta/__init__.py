"""Hecke triangle groups: symbolic dynamics, transfer operators and Selberg zeta functions."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .hecke_core import *  # noqa: F401,F403
from .interval_maps import branch_table, verify_acceleration, verify_partition  # noqa: F401
from .spectral_scan import report_spectrum, scan_line  # noqa: F401
from .symbolic_words import Word, enumerate_conj_classes, enumerate_regular_words  # noqa: F401
from .transfer_operators import build_fast_operator, fredholm_det  # noqa: F401
from .zeta_products import ZV_pm, Z_pm, Zc_pm, selberg_Z  # noqa: F401
