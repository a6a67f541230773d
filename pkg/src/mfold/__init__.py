"""Weighted Lorentz norms and maximal operators on piecewise-constant grids."""

from .maximal import WindowFamily, calderon_maximal_1d, hl_maximal, m_tensor
from .measure import (
    Grid,
    LorentzIndex,
    ScalarField,
    StepRearrangement,
    WeightField,
    distribution,
    lorentz_norm,
    lorentz_p1_norm,
    lorentz_pinf_norm,
    lp_norm,
    rearrangement,
    weighted_measure,
)
from .weights import a1_constant, ap_constant, apr_constant, cube_comparability, realize, rh_constant

__version__ = "0.1.0"
