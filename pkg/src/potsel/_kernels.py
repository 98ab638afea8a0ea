"""Dispatch to the numba or numpy kernel set (see ``_accel``)."""

from ._accel import BACKEND, USE_NUMBA

if USE_NUMBA:
    from ._kernels_numba import (
        ad_statistic,
        fit_ad_candidates,
        fit_profile,
        gpd_pit,
        profile_loglik,
        profile_loglik_grid,
        theta_grid,
    )
else:
    from ._kernels_numpy import (  # noqa: F401
        ad_statistic,
        fit_ad_candidates,
        fit_profile,
        gpd_pit,
        profile_loglik,
        profile_loglik_grid,
        theta_grid,
    )

__all__ = [
    "BACKEND",
    "ad_statistic",
    "fit_ad_candidates",
    "fit_profile",
    "gpd_pit",
    "profile_loglik",
    "profile_loglik_grid",
    "theta_grid",
]
