from .ring import Ring, Expr, NonIntegrable
from .forms import Form, ReductionUnavailable
from .charts import Chart, tstar_torus_chart, complex_plane_chart, tstar_line_chart, tstar_plane_chart, kstar_bundle_chart
from .parform import ParResult, par_form, par_equals_one_certificate, fiber_integrate_par
from .chern import (ChernBlock, CliffordSymbolData, ChernResult, NotCliffordType,
                    chern_transgression, lambda_factor, UnknownFixedSetModel)

__all__ = [
    "Ring", "Expr", "Form", "Chart", "NonIntegrable", "ReductionUnavailable",
    "tstar_torus_chart", "complex_plane_chart", "tstar_line_chart",
    "tstar_plane_chart", "kstar_bundle_chart",
    "ParResult", "par_form", "par_equals_one_certificate", "fiber_integrate_par",
    "ChernBlock", "CliffordSymbolData", "ChernResult", "NotCliffordType",
    "chern_transgression", "lambda_factor", "UnknownFixedSetModel",
]
