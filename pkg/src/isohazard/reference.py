"""Frozen reference rejection frequencies for the standard simulation designs.

All designs use ``n = 50`` and ``alpha = 0.1``. The HvK, PP and GH rows
are literature values for competing tests that this package does not
implement; they are reference data only and are never computed here.
"""

from __future__ import annotations

D_ALTERNATIVES = (-1.0, -0.9, -0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, -0.1)
D_NULL = (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0)
GAMMAS = (-0.5, -0.25, 0.0, 0.5, 1.0)

# labels: Tn -> Tn_smoothed, Durot -> durot_sup, Durot_Tn -> durot_Tn
METHOD_LABELS = {"Tn_smoothed": "Tn", "durot_sup": "Durot", "durot_Tn": "Durot_Tn"}
COMPUTED_LABELS = frozenset(METHOD_LABELS.values())

DESIGNS = {
    "table1": {
        "family": "d", "quantile": 0.95, "grid_param": "d", "grid": D_ALTERNATIVES,
        "rows": {
            "Tn": (0.869, 0.699, 0.547, 0.408, 0.323, 0.234, 0.195, 0.152, 0.125, 0.112),
            "HvK": (0.833, 0.636, 0.467, 0.361, 0.297, 0.234, 0.200, 0.183, 0.152, 0.151),
            "Durot": (0.042, 0.029, 0.024, 0.021, 0.016, 0.018, 0.015, 0.018, 0.015, 0.017),
            "Durot_Tn": (0.258, 0.162, 0.111, 0.057, 0.040, 0.028, 0.022, 0.015, 0.009, 0.004),
        },
    },
    "table2": {
        "family": "d", "quantile": 0.95, "grid_param": "d", "grid": D_NULL,
        "rows": {
            "Tn": (0.097, 0.097, 0.080, 0.0896, 0.086, 0.072, 0.076, 0.077, 0.081, 0.075, 0.071),
            "HvK": (0.146, 0.138, 0.132, 0.130, 0.124, 0.122, 0.110, 0.103, 0.102, 0.099, 0.110),
            "Durot": (0.021, 0.019, 0.018, 0.013, 0.015, 0.018, 0.021, 0.024, 0.015, 0.018, 0.021),
            "Durot_Tn": (0.003, 0.003, 0.004, 0.001, 0.002, 0.003, 0.002, 0.001, 0.001, 0.001, 0.000),
        },
    },
    "table3": {
        "family": "d", "quantile": 0.8, "grid_param": "d", "grid": D_ALTERNATIVES,
        "rows": {
            "Tn": (0.880, 0.726, 0.569, 0.433, 0.332, 0.246, 0.204, 0.163, 0.140, 0.127),
            "HvK": (0.965, 0.864, 0.766, 0.686, 0.544, 0.483, 0.434, 0.326, 0.299, 0.279),
            "Durot": (0.645, 0.524, 0.399, 0.303, 0.231, 0.168, 0.127, 0.097, 0.080, 0.075),
            "Durot_Tn": (0.742, 0.569, 0.395, 0.253, 0.181, 0.121, 0.067, 0.063, 0.038, 0.030),
        },
    },
    "table4": {
        "family": "d", "quantile": 0.8, "grid_param": "d", "grid": D_NULL,
        "rows": {
            "Tn": (0.101, 0.103, 0.101, 0.102, 0.096, 0.094, 0.087, 0.091, 0.085, 0.073, 0.074),
            "HvK": (0.256, 0.229, 0.192, 0.188, 0.170, 0.139, 0.145, 0.132, 0.121, 0.131, 0.112),
            "Durot": (0.060, 0.047, 0.043, 0.037, 0.027, 0.029, 0.037, 0.034, 0.028, 0.026, 0.025),
            "Durot_Tn": (0.024, 0.019, 0.016, 0.009, 0.013, 0.009, 0.005, 0.006, 0.006, 0.004, 0.004),
        },
    },
    # beta = 0 makes mu and sigma irrelevant: the hazard is x**gamma.
    "table5_beta0": {
        "family": "bump", "quantile": 0.95, "grid_param": "gamma", "grid": GAMMAS,
        "fixed": {"beta": 0.0},
        "null": (False, False, True, True, True),
        "rows": {
            "Tn": (1.000, 0.792, 0.213, 0.050, 0.076),
            "HvK": (0.844, 0.525, 0.437, 0.189, 0.121),
            "Durot": (0.704, 0.307, 0.096, 0.031, 0.028),
            "PP": (1.00, 0.800, 0.100, 0.000, 0.000),
            "GH": (0.983, 0.416, 0.100, 0.034, 0.027),
        },
    },
    "table5_sigma01": {
        "family": "bump", "quantile": 0.95, "grid_param": "gamma", "grid": GAMMAS,
        "fixed": {"beta": 0.3, "mu": 1.0, "sigma": 0.1},
        "rows": {
            "Tn": (0.985, 0.549, 0.229, 0.497, 0.585),
            "HvK": (0.675, 0.753, 0.772, 0.656, 0.508),
            "Durot": (0.501, 0.417, 0.320, 0.182, 0.107),
            "PP": (0.997, 0.458, 0.019, 0.000, 0.000),
            "GH": (0.962, 0.291, 0.178, 0.176, 0.154),
        },
    },
    "table5_sigma02": {
        "family": "bump", "quantile": 0.95, "grid_param": "gamma", "grid": GAMMAS,
        "fixed": {"beta": 0.3, "mu": 1.0, "sigma": 0.2},
        "rows": {
            "Tn": (0.991, 0.605, 0.172, 0.214, 0.216),
            "HvK": (0.715, 0.714, 0.663, 0.443, 0.277),
            "Durot": (0.545, 0.346, 0.218, 0.090, 0.045),
            "PP": (0.999, 0.588, 0.053, 0.000, 0.000),
            "GH": (0.968, 0.301, 0.114, 0.065, 0.054),
        },
    },
}


def reference_value(design, label, parameter):
    """Reference frequency for ``label`` at grid value ``parameter`` in ``design``."""
    d = DESIGNS[design]
    idx = [round(g, 10) for g in d["grid"]].index(round(float(parameter), 10))
    return d["rows"][label][idx]


def matching_designs(family, quantile, fixed, n=50, alpha=0.1):
    """Names of reference designs compatible with a study setup."""
    if n != 50 or abs(alpha - 0.1) > 1e-12:
        return []
    out = []
    for name, d in DESIGNS.items():
        if d["family"] != family or abs(d["quantile"] - quantile) > 1e-12:
            continue
        want = d.get("fixed", {})
        if family == "bump" and want.get("beta") == 0.0:
            if float(fixed.get("beta", 0.0)) != 0.0:
                continue
        elif any(abs(float(fixed.get(k, float("nan"))) - v) > 1e-12 for k, v in want.items()):
            continue
        out.append(name)
    return out
