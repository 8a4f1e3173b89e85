"""Exact non-archimedean arithmetic and completeness checks for root-group ultrametrics.

Subpackages:

* ``scalars``: the value scale Q + Q*sqrt(2) and the coefficient fields
* ``hahn``: finite-support Hahn series
* ``ultrametric``: omega-groups, balls and the axiom validator
* ``rootgroups``: the concrete families
* ``completeness``: projection, lifting, the chain solver and the counterexample
* ``cli``: the ``nonarch`` command
"""

from .errors import NonarchError
from .hahn import HahnSeries, parse_series
from .rootgroups import make_family
from .scalars import INF, QuadExt
from .ultrametric import Ball, validate_omega_group

__all__ = ["NonarchError", "HahnSeries", "parse_series", "make_family", "INF", "QuadExt",
           "Ball", "validate_omega_group"]
