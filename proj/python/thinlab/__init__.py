"""Thin-set uncertainty laboratory.

Python surface over the C++ core: grids and the continuous-convention
transform, measurable sets with thinness certificates, radius pairs, the
low/high splitting operators, Vitali covers, the necessity ladder, and the
symbol contraction estimate.
"""

from ._core import *  # noqa: F401,F403
from ._core import __doc__ as _core_doc  # noqa: F401

__version__ = "0.1.0"
