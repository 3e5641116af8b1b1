"""Configuration, parameter sweeps and the figure-data generators."""

from __future__ import annotations

import hashlib
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .dimer import (CONJUGATION_CONVENTIONS, DEFAULT_CONJUGATION,
                    DEFAULT_FREQUENCY_CONVENTION, FREQUENCY_CONVENTIONS,
                    build_weff, match_branches)
from .fock import JUMP_BASES, FockSystem
from .params import AnyonParams, ParameterError
from .rates import gamma_full_single, gamma_stat
from .spectra import (DEFAULT_JUMP_BASIS, GridSpec, bright_mode_overlay,
                      build_dipole, diagonal_slice, rephasing_response)


class ConfigError(ValueError):
    """Raised on malformed run configuration (unknown keys are hard errors)."""


PARAM_FIELDS = ("theta", "omega", "coupling_j", "gamma", "beta", "xi")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.count)


@dataclass
class Conventions:
    frequency: str = DEFAULT_FREQUENCY_CONVENTION
    conjugation: str = DEFAULT_CONJUGATION
    jump_basis: str = DEFAULT_JUMP_BASIS
    stat_dephasing: bool = False

    def as_dict(self) -> dict:
        return {"frequency": self.frequency, "conjugation": self.conjugation,
                "jump_basis": self.jump_basis, "stat_dephasing": self.stat_dephasing}


@dataclass
class RunConfig:
    params: AnyonParams = field(default_factory=lambda: AnyonParams(theta=0.0))
    sweep: tuple = ()
    conventions: Conventions = field(default_factory=Conventions)
    output_path: str | None = None
    svg_path: str | None = None
    threads: int = 1
    cutoff: int = 2
    grid: GridSpec = field(default_factory=GridSpec)
    t2: float = 0.0
    theta_list: tuple = ()
    xi_list: tuple = ()

    def as_dict(self) -> dict:
        return {
            "params": {k: getattr(self.params, k) for k in PARAM_FIELDS},
            "sweep": [{"name": ax.name, "start": ax.start, "stop": ax.stop, "count": ax.count}
                      for ax in self.sweep],
            "conventions": self.conventions.as_dict(),
            "output": {"path": self.output_path, "svg": self.svg_path},
            "compute": {"threads": self.threads, "cutoff": self.cutoff},
            "grid": {"count": self.grid.count, "lo": self.grid.lo, "hi": self.grid.hi},
            "t2": self.t2,
            "theta_list": list(self.theta_list),
            "xi_list": list(self.xi_list),
        }

    def sha256(self) -> str:
        canon = json.dumps(self.as_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()


def _require_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")


def config_from_dict(doc: dict) -> RunConfig:
    """Build a RunConfig from a JSON document; unknown keys are hard errors."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    _require_keys(doc, {"params", "sweep", "conventions", "output", "compute",
                        "grid", "t2", "theta_list", "xi_list"}, "config")
    pdoc = doc.get("params", {})
    _require_keys(pdoc, set(PARAM_FIELDS), "config.params")
    try:
        params = AnyonParams(theta=float(pdoc.get("theta", 0.0)),
                             **{k: float(pdoc[k]) for k in PARAM_FIELDS[1:] if k in pdoc})
    except ParameterError as exc:
        raise ConfigError(str(exc)) from exc

    axes = []
    for item in doc.get("sweep", []):
        _require_keys(item, {"name", "start", "stop", "count"}, "config.sweep[]")
        for key in ("name", "start", "stop", "count"):
            if key not in item:
                raise ConfigError(f"sweep axis missing {key!r}")
        if item["name"] not in PARAM_FIELDS:
            raise ConfigError(f"sweep axis references unknown parameter {item['name']!r}")
        count = int(item["count"])
        if count < 2:
            raise ConfigError(f"sweep axis {item['name']!r} needs count >= 2, got {count}")
        axes.append(SweepAxis(item["name"], float(item["start"]), float(item["stop"]), count))

    cdoc = doc.get("conventions", {})
    _require_keys(cdoc, {"frequency", "conjugation", "jump_basis", "stat_dephasing"},
                  "config.conventions")
    conv = Conventions(
        frequency=cdoc.get("frequency", DEFAULT_FREQUENCY_CONVENTION),
        conjugation=cdoc.get("conjugation", DEFAULT_CONJUGATION),
        jump_basis=cdoc.get("jump_basis", DEFAULT_JUMP_BASIS),
        stat_dephasing=bool(cdoc.get("stat_dephasing", False)),
    )
    if conv.frequency not in FREQUENCY_CONVENTIONS:
        raise ConfigError(f"unknown frequency convention {conv.frequency!r}")
    if conv.conjugation not in CONJUGATION_CONVENTIONS:
        raise ConfigError(f"unknown conjugation convention {conv.conjugation!r}")
    if conv.jump_basis not in JUMP_BASES:
        raise ConfigError(f"unknown jump basis {conv.jump_basis!r}")

    odoc = doc.get("output", {})
    _require_keys(odoc, {"path", "svg"}, "config.output")
    kdoc = doc.get("compute", {})
    _require_keys(kdoc, {"threads", "cutoff"}, "config.compute")
    gdoc = doc.get("grid", {})
    _require_keys(gdoc, {"count", "lo", "hi"}, "config.grid")
    grid = GridSpec(count=int(gdoc.get("count", 256)),
                    lo=float(gdoc.get("lo", -0.5)), hi=float(gdoc.get("hi", 0.5)))
    threads = int(kdoc.get("threads", 1))
    if threads < 1:
        raise ConfigError(f"threads must be >= 1, got {threads}")
    cutoff = int(kdoc.get("cutoff", 2))
    if cutoff < 1:
        raise ConfigError(f"cutoff must be >= 1, got {cutoff}")

    return RunConfig(params=params, sweep=tuple(axes), conventions=conv,
                     output_path=odoc.get("path"), svg_path=odoc.get("svg"),
                     threads=threads, cutoff=cutoff, grid=grid,
                     t2=float(doc.get("t2", 0.0)),
                     theta_list=tuple(float(x) for x in doc.get("theta_list", [])),
                     xi_list=tuple(float(x) for x in doc.get("xi_list", [])))


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return config_from_dict(doc)


def parse_range(text: str, count: int | None = None) -> SweepAxis:
    """Range grammar start:stop[:count] with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) == 2 and count is not None:
        lo, hi = float(parts[0]), float(parts[1])
        return SweepAxis("range", lo, hi, count)
    if len(parts) == 3:
        return SweepAxis("range", float(parts[0]), float(parts[1]), int(parts[2]))
    raise ConfigError(f"range must be start:stop:count (or start:stop with --grid), got {text!r}")


@dataclass
class SweepResult:
    columns: tuple
    units: tuple
    rows: list
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        k = self.columns.index(name)
        return np.array([r[k] for r in self.rows])

    def check(self):
        if len(self.columns) != len(self.units):
            raise ValueError("columns and units length mismatch")
        for r in self.rows:
            if len(r) != len(self.columns):
                raise ValueError("row width mismatch")
            for v in r:
                if isinstance(v, float) and not math.isfinite(v):
                    raise ValueError("non-finite value in sweep result")
        return self


def _provenance(config: RunConfig, kind: str) -> dict:
    return {
        "generator": kind,
        "artifact_version": __version__,
        "config_sha256": config.sha256(),
        "conventions": config.conventions.as_dict(),
    }


def _pool_map(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def run_fig1(config: RunConfig) -> SweepResult:
    """Single-oscillator rates against the statistical angle.

    Columns: theta, Gamma_stat, Re Gamma_full, Im Gamma_full at the configured
    beta and gamma.
    """
    axis = next((ax for ax in config.sweep if ax.name == "theta"), None)
    if axis is None:
        axis = SweepAxis("theta", 0.0, math.pi, 201)
    p = config.params

    def one(theta):
        pt = p.with_(theta=float(theta))
        full = gamma_full_single(pt).value
        return (float(theta), gamma_stat(pt.theta, pt.z, pt.gamma), full.real, full.imag)

    rows = _pool_map(one, axis.values(), config.threads)
    return SweepResult(
        columns=("theta", "gamma_stat", "re_gamma_full", "im_gamma_full"),
        units=("rad", "omega", "omega", "omega"),
        rows=rows, metadata=_provenance(config, "fig1"),
    ).check()


def run_fig2(config: RunConfig) -> SweepResult:
    """Dimer mode relaxation rates over (theta, xi) with branch continuity.

    Columns: theta, xi, Re/Im of both branch-continued eigenvalues, gap and
    the EP flag (gap below the detection threshold).
    """
    axis = next((ax for ax in config.sweep if ax.name == "theta"), None)
    if axis is None:
        axis = SweepAxis("theta", 0.0, math.pi, 201)
    xis = config.xi_list or (0.0, 0.25, 0.5, 0.75, 1.0)
    conv = config.conventions
    p = config.params
    threshold = 1e-6 * p.gamma

    def one_xi(xi):
        out = []
        prev = None
        for theta in axis.values():
            w = build_weff(p.with_(theta=float(theta), xi=float(xi)),
                           conv.frequency, conv.conjugation, conv.stat_dephasing)
            pair = w.eigenvalues if prev is None else match_branches(prev, w.eigenvalues)
            prev = pair
            gap = abs(pair[0] - pair[1])
            out.append((float(theta), float(xi),
                        pair[0].real, pair[1].real, pair[0].imag, pair[1].imag,
                        gap, int(gap < threshold)))
        return out

    chunks = _pool_map(one_xi, xis, config.threads)
    rows = [row for chunk in chunks for row in chunk]
    return SweepResult(
        columns=("theta", "xi", "re_lambda_plus", "re_lambda_minus",
                 "im_lambda_plus", "im_lambda_minus", "gap", "ep_flag"),
        units=("rad", "1", "omega", "omega", "omega", "omega", "omega", "bool"),
        rows=rows, metadata=_provenance(config, "fig2"),
    ).check()


@dataclass
class Fig3Result:
    grids: list           # [(theta, xi, SpectrumGrid)]
    slices: SweepResult   # stacked diagonal slices
    overlay: SweepResult  # bright-mode branch curves


def run_fig3(config: RunConfig) -> Fig3Result:
    """Rephasing spectra for each (theta, xi), with stacked diagonal slices
    and the bright-mode overlay curves."""
    if config.cutoff < 2:
        raise ConfigError("fig3 needs cutoff >= 2")
    thetas = config.theta_list or tuple(np.linspace(0.0, math.pi, 9))
    xis = config.xi_list or (0.0, 1.0)
    conv = config.conventions
    p = config.params

    grids = []
    slice_rows = []
    for xi in xis:
        for theta in thetas:
            pt = p.with_(theta=float(theta), xi=float(xi))
            system = FockSystem(cutoff=config.cutoff, theta=pt.theta, modes=2)
            dip = build_dipole(system, conv.conjugation)
            g = rephasing_response(system, dip, pt, t2=config.t2, grid=config.grid,
                                   jump_basis=conv.jump_basis, conjugation=conv.conjugation,
                                   threads=config.threads)
            grids.append((float(theta), float(xi), g))
            det, vals = diagonal_slice(g)
            for nu, v in zip(det, vals):
                slice_rows.append((float(theta), float(xi), float(nu),
                                   float(v.real), float(v.imag), float(abs(v))))

    slices = SweepResult(
        columns=("theta", "xi", "detuning", "re", "im", "abs"),
        units=("rad", "1", "omega", "arb", "arb", "arb"),
        rows=slice_rows, metadata=_provenance(config, "fig3-slices"),
    ).check()

    overlay_rows = []
    theta_grid = np.linspace(min(thetas), max(thetas), 201) if len(thetas) > 1 else np.array(thetas)
    for xi in xis:
        curve = bright_mode_overlay(theta_grid, p.with_(xi=float(xi)),
                                    conv.frequency, conv.conjugation, conv.stat_dephasing)
        for row in curve:
            overlay_rows.append((float(row[0]), float(xi), float(row[1]), float(row[2]),
                                 float(row[3]), float(row[4])))
    overlay = SweepResult(
        columns=("theta", "xi", "nu_branch_1", "nu_branch_2", "re_branch_1", "re_branch_2"),
        units=("rad", "1", "omega", "omega", "omega", "omega"),
        rows=overlay_rows, metadata=_provenance(config, "fig3-overlay"),
    ).check()
    return Fig3Result(grids, slices, overlay)


def run_sweep(config: RunConfig) -> SweepResult:
    """Generic closed-form sweep over the configured axes.

    Rows are the cartesian product of the axes in order; per row the
    single-oscillator rates and the dimer eigenvalues are evaluated.
    """
    if not config.sweep:
        raise ConfigError("sweep config needs at least one axis")
    conv = config.conventions
    p = config.params
    grids = [ax.values() for ax in config.sweep]
    names = [ax.name for ax in config.sweep]
    mesh = np.meshgrid(*grids, indexing="ij")
    points = np.stack([m.ravel() for m in mesh], axis=-1)

    def one(point):
        pt = p.with_(**{n: float(v) for n, v in zip(names, point)})
        full = gamma_full_single(pt).value
        w = build_weff(pt, conv.frequency, conv.conjugation, conv.stat_dephasing)
        lp, lm = w.eigenvalues
        return tuple(float(v) for v in point) + (
            gamma_stat(pt.theta, pt.z, pt.gamma), full.real, full.imag,
            lp.real, lp.imag, lm.real, lm.imag, abs(lp - lm))

    rows = _pool_map(one, list(points), config.threads)
    cols = tuple(names) + ("gamma_stat", "re_gamma_full", "im_gamma_full",
                           "re_lambda_plus", "im_lambda_plus",
                           "re_lambda_minus", "im_lambda_minus", "gap")
    units = tuple("rad" if n == "theta" else "1" if n == "xi" else "omega" for n in names) + \
        ("omega",) * 8
    return SweepResult(columns=cols, units=units, rows=rows,
                       metadata=_provenance(config, "sweep")).check()
