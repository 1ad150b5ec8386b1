"""Experiment drivers that write the CSV data behind the tradeoff, beampattern
and correlation figures.

All floats are written with 17 significant digits so that values round-trip
exactly. Work items are evaluated in a thread pool, and results are written
in grid order, so output files do not depend on the thread count.
"""

from __future__ import annotations

import csv
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .array_model import beampattern
from .channel_model import CommChannel, achievable_rate, draw_rayleigh_channel, gamma_of_Gamma, snr_threshold
from .config import Scenario, SweepSpec
from .errors import InfeasibleError
from .fim import angle_crb_closed, angle_crb_schur, crb_trace, fim_single
from .solver import ReducedProblem, oracle_solve, single_user_basis, solve_closed_form, benchmark_solutions
from .subspace import corr_coeff, normalize_reports

PARETO_COLUMNS = ["gamma_bpshz", "Gamma_mw", "nu1_sq", "nu2_sq", "nu3_sq", "crb_trace", "angle_crb_rad2",
                  "root_crb_deg", "rate_bpshz", "method", "regime"]
BEAM_COLUMNS = ["theta_deg", "p_isac_ao", "p_isac_detmax", "p_crbmin", "p_commopt"]
CORR_COLUMNS = ["channel_id", "seed", "G", "G_quadrature", "G_normalized"]
REGION_COLUMNS = ["channel_id", "seed", "gamma_bpshz", "Gamma_mw", "nu1_sq", "angle_crb_rad2",
                  "root_crb_deg", "rate_bpshz", "regime"]


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


def write_csv(path, columns, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(row.get(c)) for c in columns])


def _pmap(fn, items, threads: int):
    items = list(items)
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def channel_for(scn: Scenario, spec: SweepSpec, index: int = 0) -> CommChannel:
    """Channel realization ``index``, drawn with seed ``scn.seed + index``."""
    return draw_rayleigh_channel(scn.seed + index, scn.n_t, spec.normalize_channels, scn.sigma_c_sq)


def max_rate(scn: Scenario, ch: CommChannel) -> float:
    return gamma_of_Gamma(ch.gamma_max(scn.P), scn.sigma_c_sq)


def _metrics(scn, ch, R, nu_abs):
    F = fim_single(scn, R)
    return {
        "nu1_sq": nu_abs[0] ** 2,
        "nu2_sq": nu_abs[1] ** 2,
        "nu3_sq": nu_abs[2] ** 2,
        "crb_trace": crb_trace(F),
        "rate_bpshz": achievable_rate(R, ch),
    }


def pareto_point(scn: Scenario, ch: CommChannel, gamma: float) -> list[dict]:
    """Closed-form and bisection-oracle rows for one rate threshold."""
    Gamma = snr_threshold(gamma, scn.sigma_c_sq).Gamma
    base = {"gamma_bpshz": gamma, "Gamma_mw": Gamma}
    try:
        sol = solve_closed_form(scn, ch, Gamma)
    except InfeasibleError:
        return [dict(base, method=m, regime="infeasible") for m in ("closed", "oracle")]

    closed = dict(base, method="closed", regime=sol.regime, **_metrics(scn, ch, sol.R, sol.nu_abs))
    closed["angle_crb_rad2"] = angle_crb_closed(sol.nu1_sq, scn)

    basis = sol.basis
    mags = oracle_solve(ReducedProblem.from_basis(basis, scn.P, Gamma), "bisection")
    u = basis.vector(mags)
    R = np.outer(u, u.conj())
    oracle = dict(base, method="oracle", regime=sol.regime, **_metrics(scn, ch, R, mags))
    oracle["angle_crb_rad2"] = angle_crb_schur(fim_single(scn, R))
    for row in (closed, oracle):
        row["root_crb_deg"] = np.rad2deg(np.sqrt(row["angle_crb_rad2"]))
    return [closed, oracle]


def pareto_rows(scn: Scenario, spec: SweepSpec, ch: CommChannel | None = None, threads: int = 1) -> list[dict]:
    scn.require_single_target()
    ch = ch if ch is not None else channel_for(scn, spec)
    grid = spec.gamma_grid(max_rate(scn, ch))
    per_point = _pmap(lambda g: pareto_point(scn, ch, float(g)), grid, threads)
    return [row for rows in per_point for row in rows]


def run_pareto(scn: Scenario, spec: SweepSpec, out_path, ch: CommChannel | None = None, threads: int = 1):
    rows = pareto_rows(scn, spec, ch, threads)
    write_csv(out_path, PARETO_COLUMNS, rows)
    return rows


@dataclass(frozen=True)
class BeamCovariances:
    ao: np.ndarray
    detmax: np.ndarray
    crbmin: np.ndarray
    commopt: np.ndarray


def beam_covariances(scn: Scenario, ch: CommChannel, gamma: float) -> BeamCovariances:
    Gamma = snr_threshold(gamma, scn.sigma_c_sq).Gamma
    ao = solve_closed_form(scn, ch, Gamma, "AO").R
    det = solve_closed_form(scn, ch, Gamma, "DetMax").R
    comm, crbmin = benchmark_solutions(scn, ch)
    return BeamCovariances(ao, det, crbmin, comm)


def beampattern_rows(scn: Scenario, ch: CommChannel, gamma: float) -> list[dict]:
    scn.require_single_target()
    covs = beam_covariances(scn, ch, gamma)
    theta_deg = np.linspace(-90.0, 90.0, 361)
    th = np.deg2rad(theta_deg)
    cols = {
        "p_isac_ao": beampattern(covs.ao, th),
        "p_isac_detmax": beampattern(covs.detmax, th),
        "p_crbmin": beampattern(covs.crbmin, th),
        "p_commopt": beampattern(covs.commopt, th),
    }
    return [dict({"theta_deg": t}, **{k: v[i] for k, v in cols.items()}) for i, t in enumerate(theta_deg)]


def run_beampattern(scn: Scenario, ch: CommChannel, gamma: float, out_path):
    rows = beampattern_rows(scn, ch, gamma)
    write_csv(out_path, BEAM_COLUMNS, rows)
    return rows


def _corr_channel(scn: Scenario, spec: SweepSpec, i: int):
    ch = channel_for(scn, spec, i)
    basis = single_user_basis(scn, ch)
    gmax = basis.gamma_max(scn.P)
    report = corr_coeff(basis, scn.P, spec.Gamma1_frac * gmax, spec.Gamma2_frac * gmax,
                        channel_id=i, seed=scn.seed + i)
    region = []
    for gamma in spec.gamma_grid(max_rate(scn, ch)):
        Gamma = snr_threshold(float(gamma), scn.sigma_c_sq).Gamma
        row = {"channel_id": i, "seed": scn.seed + i, "gamma_bpshz": gamma, "Gamma_mw": Gamma}
        try:
            sol = solve_closed_form(scn, ch, Gamma)
        except InfeasibleError:
            region.append(dict(row, regime="infeasible"))
            continue
        acrb = angle_crb_closed(sol.nu1_sq, scn)
        region.append(dict(row, nu1_sq=sol.nu1_sq, angle_crb_rad2=acrb,
                           root_crb_deg=np.rad2deg(np.sqrt(acrb)),
                           rate_bpshz=achievable_rate(sol.R, ch), regime=sol.regime))
    return report, region


def corr_study(scn: Scenario, spec: SweepSpec, threads: int = 1):
    """Per-channel correlation reports (normalized) and the per-channel region rows."""
    scn.require_single_target()
    results = _pmap(lambda i: _corr_channel(scn, spec, i), range(spec.channels), threads)
    reports = normalize_reports([r for r, _ in results])
    region = [row for _, rows in results for row in rows]
    return reports, region


def region_path(out_path) -> Path:
    out_path = Path(out_path)
    return out_path.with_name(out_path.stem + "_region" + (out_path.suffix or ".csv"))


def run_corr_study(scn: Scenario, spec: SweepSpec, out_path, threads: int = 1):
    """Write per-channel G rows to ``out_path`` and region rows next to it (``*_region.csv``)."""
    reports, region = corr_study(scn, spec, threads)
    summary = [{"channel_id": r.channel_id, "seed": r.seed, "G": r.G_analytic,
                "G_quadrature": r.G_quadrature, "G_normalized": r.G_normalized} for r in reports]
    write_csv(out_path, CORR_COLUMNS, summary)
    write_csv(region_path(out_path), REGION_COLUMNS, region)
    return reports, region
