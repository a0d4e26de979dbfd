"""Orchestration of the four experiment types.

Each run_* function maps a validated RunConfig to a set of named artifacts
(CSV text) plus a manifest. Nothing here touches the filesystem; the CLI
(or any other client of the service) decides where bytes land. All output
is deterministic for a fixed config; wall-clock timings live only in the
manifest, which is excluded from byte-for-byte comparisons.
"""

from __future__ import annotations

import cmath
import hashlib
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import awf, classical, evolve, states
from .config import RunConfig
from .hilbert import ModelParams, build_basis, build_hamiltonian

TAIL_POPULATION_LIMIT = 1e-8


@dataclass(frozen=True)
class RunResult:
    kind: str
    files: dict[str, str]  # name -> CSV text
    manifest: dict


@lru_cache(maxsize=4)
def _decomposition(params: ModelParams) -> evolve.SpectralDecomp:
    """Eigendecomposition cache; the expensive part of every quantum run."""
    return evolve.diagonalize(build_hamiltonian(params))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _time_axis(cfg: RunConfig) -> np.ndarray:
    tg = cfg.time_grid
    n = int(round((tg.t_end - tg.t_start) / tg.dt))
    return tg.t_start + tg.dt * np.arange(n + 1)


def _initial_state(cfg: RunConfig, ic) -> tuple[np.ndarray, complex, states.PhasePoint]:
    params = cfg.model.to_params()
    atomic = ic.atomic_point(params.J)
    pt = states.energy_matched_field_point(atomic, cfg.energy, params)
    w, nu = states.phase_point_to_parameters(pt, params.J)
    psi0 = states.product_state(w, nu, params)
    return psi0, w, pt


def _manifest(cfg: RunConfig, kind: str, files: dict[str, str], extra: dict) -> dict:
    blob = cfg.canonical_json().encode()
    manifest = {
        "schema_version": 1,
        "kind": kind,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "files": [
            {
                "name": name,
                "sha256": hashlib.sha256(text.encode()).hexdigest(),
                "bytes": len(text.encode()),
            }
            for name, text in sorted(files.items())
        ],
    }
    manifest.update(extra)
    return manifest


def _entropy_csv(series: evolve.EntropySeries) -> str:
    lines = ["t,delta_a"]
    for t, d in zip(series.times, series.delta_a):
        lines.append(f"{_fmt(t)},{_fmt(d)}")
    return "\n".join(lines) + "\n"


def _wigner_csv(grid: awf.WignerGrid) -> str:
    lines = [
        "theta," + ",".join(_fmt(t) for t in grid.thetas),
        "phi," + ",".join(_fmt(p) for p in grid.phis),
    ]
    for row in grid.values:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _poincare_csv(sec: classical.SectionPoints) -> str:
    lines = ["t_cross,q_a,p_a"]
    for t, q, p in zip(sec.times, sec.q_a, sec.p_a):
        lines.append(f"{_fmt(t)},{_fmt(q)},{_fmt(p)}")
    return "\n".join(lines) + "\n"


def _fan_out(worker, items, threads: int):
    """Run independent per-condition jobs, optionally on a thread pool.

    Results are reassembled in input order, so the artifact set does not
    depend on scheduling.
    """
    if threads == 1 or len(items) == 1:
        return [worker(item) for item in items]
    max_workers = threads if threads > 0 else min(len(items), 4)
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(worker, items))


def run_spectrum(cfg: RunConfig, threads: int = 0) -> RunResult:
    t0 = time.perf_counter()
    params = cfg.model.to_params()
    dec = _decomposition(params)
    text = "energy\n" + "\n".join(_fmt(e) for e in dec.eigenvalues) + "\n"
    files = {"spectrum.csv": text}
    manifest = _manifest(
        cfg,
        "spectrum",
        files,
        {
            "dimension": params.dim,
            "timings_s": {"total": time.perf_counter() - t0},
        },
    )
    return RunResult(kind="spectrum", files=files, manifest=manifest)


def run_entropy(cfg: RunConfig, threads: int = 0) -> RunResult:
    t0 = time.perf_counter()
    params = cfg.model.to_params()
    times = _time_axis(cfg)
    dec = _decomposition(params)

    def one(ic):
        psi0, _, _ = _initial_state(cfg, ic)
        series = evolve.entropy_series(params, psi0, times, dec=dec)
        return ic.label, series

    results = _fan_out(one, cfg.initial_conditions, threads)
    files = {}
    audit = {}
    features = {}
    for label, series in results:
        files[f"entropy_{label}.csv"] = _entropy_csv(series)
        audit[label] = series.max_tail_population
        features[label] = {
            "first_max_t": float(series.max_times[0]) if len(series.max_times) else None,
            "first_max_delta": float(series.max_values[0]) if len(series.max_values) else None,
            "plateau_onset_t": series.plateau_onset,
        }
    worst = max(audit.values()) if audit else 0.0
    manifest = _manifest(
        cfg,
        "entropy",
        files,
        {
            "dimension": params.dim,
            "cutoff_audit": {
                "n_max": params.n_max,
                "max_tail_population": worst,
                "per_condition": audit,
                "limit": TAIL_POPULATION_LIMIT,
                "flagged": worst > TAIL_POPULATION_LIMIT,
            },
            "series_features": features,
            "timings_s": {"total": time.perf_counter() - t0},
        },
    )
    return RunResult(kind="entropy", files=files, manifest=manifest)


def _snapshot_times(cfg: RunConfig, series: evolve.EntropySeries) -> list[float]:
    """Snapshot schedule for one condition.

    Policy "ale-extrema": t=0, first two linear-entropy maxima, first two
    minima after the first maximum, and the plateau onset. "fixed-times":
    exactly the listed times, snapped to the evolution grid.
    """
    times = series.times
    if cfg.snapshots.policy == "fixed-times":
        snap = []
        for t in cfg.snapshots.times or []:
            k = int(np.argmin(np.abs(times - t)))
            snap.append(float(times[k]))
    else:
        snap = [float(times[0])]
        snap += [float(t) for t in series.max_times[:2]]
        first_max = series.max_times[0] if len(series.max_times) else None
        if first_max is not None:
            later_min = series.min_times[series.min_times > first_max]
            snap += [float(t) for t in later_min[:2]]
        if series.plateau_onset is not None:
            snap.append(float(series.plateau_onset))
    out = []
    for t in snap:  # drop duplicates, keep order
        if not any(abs(t - s) < 1e-12 for s in out):
            out.append(t)
    return out


def run_wigner(cfg: RunConfig, threads: int = 0) -> RunResult:
    t0 = time.perf_counter()
    params = cfg.model.to_params()
    basis = build_basis(params)
    times = _time_axis(cfg)
    dec = _decomposition(params)
    grid = awf.make_grid(cfg.wigner_grid.n_theta, cfg.wigner_grid.n_phi)

    def one(ic):
        psi0, w, _ = _initial_state(cfg, ic)
        phi0 = cmath.phase(w) if w != 0 else 0.0
        series = evolve.entropy_series(params, psi0, times, dec=dec)
        snap_times = _snapshot_times(cfg, series)
        cond_files: dict[str, str] = {}
        metrics: dict[str, dict] = {}
        reference = None
        for t in snap_times:
            psi = evolve.propagate(dec, psi0, t)
            rho = evolve.reduce_atomic(psi, basis)
            wgrid = awf.wigner_on_grid(awf.multipole_coeffs(rho), grid, phi0)
            if reference is None:
                reference = wgrid  # first snapshot is t=0 by construction
            name = f"wigner_{ic.label}_t{_fmt(t)}.csv"
            cond_files[name] = _wigner_csv(wgrid)
            neg = awf.negativity_metrics(wgrid)
            structure = {
                str(alpha): vars(awf.structure_metrics(wgrid, alpha, reference))
                for alpha in (0.3, 0.5, 0.7)
            }
            metrics[name] = {
                "t": t,
                "max_w": float(np.max(wgrid.values)),
                "min_w": neg.min_value,
                "depth_fraction": neg.depth_fraction,
                "negative_solid_angle": neg.negative_solid_angle,
                "mirror_asymmetry": awf.mirror_asymmetry(wgrid),
                "structure_by_alpha": structure,
            }
        return ic.label, cond_files, metrics, series.max_tail_population, phi0

    results = _fan_out(one, cfg.initial_conditions, threads)
    files: dict[str, str] = {}
    all_metrics = {}
    audit = {}
    frames = {}
    for label, cond_files, metrics, tail, phi0 in results:
        files.update(cond_files)
        all_metrics[label] = metrics
        audit[label] = tail
        frames[label] = phi0
    worst = max(audit.values()) if audit else 0.0
    manifest = _manifest(
        cfg,
        "wigner",
        files,
        {
            "dimension": params.dim,
            "frame_phi0": frames,
            "snapshot_metrics": all_metrics,
            "cutoff_audit": {
                "n_max": params.n_max,
                "max_tail_population": worst,
                "per_condition": audit,
                "limit": TAIL_POPULATION_LIMIT,
                "flagged": worst > TAIL_POPULATION_LIMIT,
            },
            "timings_s": {"total": time.perf_counter() - t0},
        },
    )
    return RunResult(kind="wigner", files=files, manifest=manifest)


def run_poincare(cfg: RunConfig, threads: int = 0) -> RunResult:
    t0 = time.perf_counter()
    params = cfg.model.to_params()

    def one(ic):
        atomic = ic.atomic_point(params.J)
        pt = states.energy_matched_field_point(atomic, cfg.energy, params)
        sec = classical.poincare_section(pt, cfg.poincare_crossings, params)
        return ic.label, sec

    results = _fan_out(one, cfg.initial_conditions, threads)
    files = {}
    counts = {}
    for label, sec in results:
        files[f"poincare_{label}.csv"] = _poincare_csv(sec)
        counts[label] = int(len(sec.times))
    manifest = _manifest(
        cfg,
        "poincare",
        files,
        {
            "requested_crossings": cfg.poincare_crossings,
            "crossings": counts,
            "timings_s": {"total": time.perf_counter() - t0},
        },
    )
    return RunResult(kind="poincare", files=files, manifest=manifest)


RUNNERS = {
    "spectrum": run_spectrum,
    "entropy": run_entropy,
    "wigner": run_wigner,
    "poincare": run_poincare,
}
