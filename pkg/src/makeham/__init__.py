"""Makeham-family mortality models as two-component competing-risk mixtures."""

from .models import (
    BeardMakeham,
    FAMILIES,
    GammaGompertzMakeham,
    GompertzMakeham,
    HazardModel,
    KannistoMakeham,
    SilerMakeham,
    ValidationReport,
    baseline_hazard,
    cumulative_hazard,
    density,
    family_name,
    from_params,
    param_names,
    parameters,
    survival,
    total_hazard,
    validate,
)
from .mixture import (
    MixtureDecomposition,
    component_density,
    conditional_hazard_premature,
    decompose,
    mixing_proportion,
    modal_age,
    premature_prevalence,
    remaining_life_expectancy,
    threshold_age,
)
from .special import (
    DEFAULT_QUADRATURE,
    QuadratureConfig,
    find_root,
    gauss_2f1,
    integrate,
    upper_incomplete_gamma,
)

__version__ = "0.1.0"
