"""Named sweep recipes for the standard figure data sets.

Each recipe is a list of ``(stem, config)`` parts; every part is an ordinary
sweep config and is written to ``<stem>.csv`` or ``<stem>.json``. Grids are
sized to run on a desktop in minutes.
"""

from __future__ import annotations

import math

PI = math.pi


def _theta_axis(count: int, lo: float = 0.1, hi: float = 1.5) -> dict:
    return {"name": "theta", "min": lo, "max": hi, "count": count}


RECIPES: dict[str, list[tuple[str, dict]]] = {
    # bare emitter, qubits on the Mollow sidebands
    "fig3b": [("fig3b", {
        "model": "bare-tls", "reference": "kappa",
        "axes": [{"name": "omega0", "min": 0.1, "max": 100.0, "count": 61, "scale": "log"},
                 {"name": "delta0", "min": 0.1, "max": 100.0, "count": 61, "scale": "log"}],
        "outputs": ["Cd", "r_eff", "mu_eff", "N1", "absM"]})],
    # Purcell regime, kappa = 10 g, theta = pi/4
    "fig4a": [
        ("fig4a_purcell", {
            "model": "purcell", "reference": "kappa", "fixed": {"theta": PI / 4, "g": 0.1},
            "axes": [{"name": "omega_tilde", "min": 1.0, "max": 100.0, "count": 21,
                      "scale": "log"}],
            "outputs": ["Cd", "r_eff", "mu_eff"]}),
        ("fig4a_full", {
            "model": "full-cavity", "reference": "kappa", "n_fock": 3,
            "fixed": {"theta": PI / 4, "g": 0.1},
            "axes": [{"name": "omega_tilde", "min": 1.0, "max": 100.0, "count": 21,
                      "scale": "log"}],
            "outputs": ["Cd", "r_eff", "mu_eff"]}),
    ],
    "fig4b": [("fig4b", {
        "model": "full-cavity", "reference": "kappa", "n_fock": 3,
        "fixed": {"omega_tilde": 30.0, "g": 0.1},
        "axes": [_theta_axis(30, 0.05, 1.52)],
        "outputs": ["Cd", "r_eff", "mu_eff"]})],
    # emitter eliminated: Gaussian cavities, cooperativity 10
    "fig5a": [
        ("fig5a_qms", {
            "model": "qms", "reference": "gamma0",
            "fixed": {"omega_tilde": 30.0, "kappa": 1e-3, "g": 0.1},
            "axes": [_theta_axis(29)],
            "outputs": ["Cd", "EN", "r_eff", "mu_eff"]}),
        ("fig5a_rwa", {
            "model": "dressed-rwa", "reference": "gamma0", "n_fock": 12,
            "fixed": {"omega_tilde": 30.0, "kappa": 1e-3, "g": 0.1},
            "axes": [_theta_axis(8)],
            "outputs": ["Cd", "EN", "r_eff", "mu_eff"]}),
    ],
    "fig5b": [("fig5b", {
        "model": "qms", "reference": "gamma0", "fixed": {"C": 10.0, "g": 0.1},
        "axes": [{"name": "omega_tilde", "min": 1.0, "max": 1000.0, "count": 25,
                  "scale": "log"}],
        "optimize_over": ["theta"],
        "outputs": ["Cd", "EN", "r_eff", "mu_eff"]})],
    "fig5c": [("fig5c", {
        "model": "qms", "reference": "gamma0", "fixed": {"omega_tilde": 100.0, "C": 10.0,
                                                         "g": 0.1},
        "axes": [{"name": "delta_c", "min": 80.0, "max": 120.0, "count": 41}],
        "optimize_over": ["theta"],
        "outputs": ["Cd", "EN", "r_eff", "mu_eff"]})],
    "fig5d": [("fig5d", {
        "model": "qms", "reference": "gamma0", "fixed": {"omega_tilde": 500.0, "g": 0.1},
        "axes": [{"name": "C", "min": 0.1, "max": 1000.0, "count": 25, "scale": "log"}],
        "optimize_over": ["theta"],
        "outputs": ["Cd", "EN"]})],
    # weak-coupling Bogoliubov rates
    "fig6": [
        ("fig6a", {
            "model": "qms", "reference": "gamma0",
            "fixed": {"omega_tilde": 100.0, "theta": PI / 3, "g": 0.1, "kappa": 1e-3},
            "axes": [{"name": "delta_c", "min": 90.0, "max": 110.0, "count": 81}],
            "outputs": ["g_tms", "Gamma_theta"]}),
        ("fig6b", {
            "model": "qms", "reference": "gamma0",
            "fixed": {"omega_tilde": 100.0, "g": 0.1, "kappa": 1e-3},
            "axes": [_theta_axis(57, 0.05, 1.55)],
            "outputs": ["r_theta", "N_th", "Gamma_theta"]}),
    ],
    # weak to strong coupling, Bogoliubov-frame RWA numerics, omega_tilde = 75 g
    "fig7": [
        (f"fig7_{tag}_{model}", {
            "model": model, "reference": "g",
            **({"n_fock": 12} if model == "bogoliubov" else {}),
            "fixed": {"omega_tilde": 75.0, "gamma0": g0, "kappa": k},
            "axes": [_theta_axis(8 if model == "bogoliubov" else 29, 0.1, 1.4)],
            "outputs": ["Cd"]})
        for tag, g0, k in (("weak", 10.0, 1.0), ("mid", 1.0, 0.1), ("strong", 0.025, 0.025))
        for model in ("qms", "bogoliubov")
    ],
    # sideband structure at strong coupling, kappa = gamma0 = g/40
    "fig8a": [
        ("fig8a_rwa", {
            "model": "bogoliubov", "reference": "g", "n_fock": 12,
            "fixed": {"omega_tilde": 75.0, "theta": PI / 3, "gamma0": 0.025, "kappa": 0.025},
            "axes": [{"name": "delta_q", "min": 73.5, "max": 76.5, "count": 61}],
            "outputs": ["N1", "N2", "absM"]}),
        ("fig8a_qms", {
            "model": "qms", "reference": "g",
            "fixed": {"omega_tilde": 75.0, "theta": PI / 3, "gamma0": 0.025, "kappa": 0.025},
            "axes": [{"name": "delta_q", "min": 73.5, "max": 76.5, "count": 61}],
            "outputs": ["N1", "N2", "absM"]}),
    ],
    "fig8b": [
        ("fig8b_rwa", {
            "model": "bogoliubov", "reference": "g", "n_fock": 12,
            "fixed": {"omega_tilde": 75.0, "theta": PI / 3, "gamma0": 0.025, "kappa": 0.025},
            "axes": [{"name": "delta_q", "min": 73.5, "max": 76.5, "count": 61}],
            "outputs": ["Cd"]}),
        ("fig8b_qms", {
            "model": "qms", "reference": "g",
            "fixed": {"omega_tilde": 75.0, "theta": PI / 3, "gamma0": 0.025, "kappa": 0.025},
            "axes": [{"name": "delta_q", "min": 73.5, "max": 76.5, "count": 61}],
            "outputs": ["Cd"]}),
    ],
    # full network, resonant drive, optimized per qubit linewidth
    "fig9": [("fig9", {
        "model": "network", "reference": "kappa", "fixed": {"delta0": 0.0},
        "axes": [{"name": "gamma", "min": 0.01, "max": 100.0, "count": 17, "scale": "log",
                  "label": "gamma_over_kappa"}],
        "optimize_over": ["omega0", "delta_q"],
        "outputs": ["concurrences", "coherences"]})],
}


def recipe(name: str) -> list[tuple[str, dict]]:
    if name not in RECIPES:
        raise KeyError(f"unknown recipe {name!r}; available: {', '.join(RECIPES)}")
    return [(stem, {"name": stem, **cfg}) for stem, cfg in RECIPES[name]]
