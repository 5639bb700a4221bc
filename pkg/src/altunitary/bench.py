"""Parameter sweeps over (j, k, L), record persistence and Table-style reports.

Grid conventions::

    eta = eta_scale * (0.8 + 0.04 j) * delta_ref
    M   = floor(m_scale * (1 + 0.2 k) / eta)

with ``eta_scale = 1, delta_ref = 2 hx0, m_scale = 1`` for the two-level model and
``eta_scale = 0.025, delta_ref = N N^(-1/3), m_scale = N`` for the p-spin model.
"""

from __future__ import annotations

import copy
import csv
import functools
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, NamedTuple, Sequence

import numpy as np

from . import adiabatic, alternating, models
from .linalg import SpectralDecomposition, populations, subspace_fidelity

log = logging.getLogger(__name__)

RECORD_HEADER = ["method", "j", "k", "L", "eta", "M", "time", "F_GS"]
POPULATION_HEADER = ["record", "slice", "index", "population"]
GROUND_WINDOW = 1e-8


class ConfigError(ValueError):
    pass


class RecordFormatError(ValueError):
    pass


# -- specification ------------------------------------------------------------


@dataclass(frozen=True)
class SweepSpec:
    model: dict
    j_values: tuple[int, ...]
    k_values: tuple[int, ...]
    L_values: tuple[int, ...]
    eta_scale: float | None = None
    delta_ref: float | None = None
    variant: str = "standard"
    adiabatic_T_policy: Any = "mirror"
    adiabatic_tolerance: float = 1e-8
    adiabatic_initial_steps: int = 8
    adiabatic_max_doublings: int = 20
    midpoint: bool = False
    record_populations: bool = False

    def __post_init__(self):
        kind = self.model.get("kind")
        if kind not in ("two-level", "pspin"):
            raise ConfigError(f"model.kind must be 'two-level' or 'pspin', got {kind!r}")
        for name in ("j_values", "k_values", "L_values"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError(f"grid {name} is empty")
            if any(int(v) != v for v in vals):
                raise ConfigError(f"grid {name} must hold integers")
            object.__setattr__(self, name, tuple(int(v) for v in vals))
        if any(L < 1 for L in self.L_values):
            raise ConfigError("every L must be >= 1")
        if self.variant not in alternating.VARIANTS:
            raise ConfigError(f"variant must be one of {alternating.VARIANTS}")
        if self.variant == "reduced" and any(L % 2 for L in self.L_values):
            raise ConfigError("reduced variant requires even L values")
        try:
            scales = (self.resolved_eta_scale, self.resolved_delta_ref)
        except KeyError as exc:
            raise ConfigError(f"model block is missing {exc}") from None
        if min(scales) <= 0:
            raise ConfigError("eta_scale and delta_ref must be positive")
        pol = self.adiabatic_T_policy
        if not (pol in ("mirror", "none") or isinstance(pol, (list, tuple))):
            raise ConfigError("adiabatic policy must be 'mirror', 'none' or a list of times")
        if isinstance(pol, (list, tuple)):
            if not all(isinstance(t, (int, float)) and t > 0 for t in pol):
                raise ConfigError("explicit adiabatic times must be positive numbers")
            object.__setattr__(self, "adiabatic_T_policy", tuple(float(t) for t in pol))
        if not self.adiabatic_tolerance > 0:
            raise ConfigError("adiabatic tolerance must be positive")
        if self.adiabatic_initial_steps < 8:
            raise ConfigError("adiabatic initial_steps must be >= 8")
        if self.adiabatic_max_doublings < 1:
            raise ConfigError("adiabatic max_doublings must be >= 1")

    @property
    def is_pspin(self) -> bool:
        return self.model["kind"] == "pspin"

    @property
    def resolved_eta_scale(self) -> float:
        if self.eta_scale is not None:
            return float(self.eta_scale)
        return 0.025 if self.is_pspin else 1.0

    @property
    def resolved_delta_ref(self) -> float:
        if self.delta_ref is not None:
            return float(self.delta_ref)
        if self.is_pspin:
            n = self.model["N"]
            return n * n ** (-1.0 / 3.0)
        return 2.0 * self.model["hx0"]

    @property
    def m_scale(self) -> float:
        return float(self.model["N"]) if self.is_pspin else 1.0


def _model_key(model: dict) -> tuple:
    if model["kind"] == "pspin":
        return ("pspin", int(model["N"]), int(model["p"]),
                float(model.get("J", 1.0)), float(model.get("Gamma", 1.0)))
    return ("two-level", float(model["hx0"]), float(model.get("hz0", 1.0)))


@functools.lru_cache(maxsize=8)
def _build(key: tuple) -> tuple[models.HamiltonianFamily, models.Schedule]:
    if key[0] == "pspin":
        _, N, p, J, gamma = key
        return models.pspin_family(N, p, J, gamma), models.pspin_schedule(1)
    _, hx0, hz0 = key
    return models.two_level_family(hx0, hz0), models.two_level_schedule(hx0, hz0, 1)


def build_model(spec_or_model) -> tuple[models.HamiltonianFamily, models.Schedule]:
    model = spec_or_model.model if isinstance(spec_or_model, SweepSpec) else spec_or_model
    try:
        return _build(_model_key(model))
    except KeyError as exc:
        raise ConfigError(f"model block is missing {exc}") from None
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# -- grid ---------------------------------------------------------------------


class GridPoint(NamedTuple):
    j: int
    k: int
    L: int
    eta: float
    M: int


def resolve_grid(spec: SweepSpec) -> list[GridPoint]:
    """Grid entries in lexicographic (j, k, L) order; entries with M < 2 are dropped."""
    out = []
    scale, delta, m_scale = spec.resolved_eta_scale, spec.resolved_delta_ref, spec.m_scale
    for j in sorted(spec.j_values):
        eta = scale * (0.8 + 0.04 * j) * delta
        for k in sorted(spec.k_values):
            M = math.floor(m_scale * (1 + 0.2 * k) / eta)
            if M < 2:
                log.warning("dropping grid entry j=%d k=%d: M=%d < 2", j, k, M)
                continue
            for L in sorted(spec.L_values):
                out.append(GridPoint(j, k, L, eta, M))
    if not out:
        raise ConfigError("every grid entry was dropped (M < 2)")
    return out


# -- records ------------------------------------------------------------------


@dataclass(eq=True)
class RunRecord:
    method: str
    j: int
    k: int
    L: int
    eta: float | None
    M: int
    time: float
    F_GS: float
    slice_populations: np.ndarray | None = field(default=None, compare=False)
    slice_states: tuple | None = field(default=None, compare=False, repr=False)
    converged: bool = field(default=True, compare=False)
    norm_drift: float = field(default=0.0, compare=False)

    def same_as(self, other: "RunRecord") -> bool:
        """Field equality including populations."""
        if self != other:
            return False
        a, b = self.slice_populations, other.slice_populations
        if a is None or b is None:
            return a is None and b is None
        return a.shape == b.shape and bool(np.array_equal(a, b))


def _ground_space(family, schedule) -> np.ndarray:
    return family.decompose(schedule(1.0)).ground_space(GROUND_WINDOW)


def _slice_decomps(family, schedule, L) -> list[SpectralDecomposition]:
    return [family.decompose(schedule(l / L)) for l in range(L + 1)]


def _alternating_point(args) -> RunRecord:
    model, point, variant, midpoint, record_pops, keep_states = args
    family, schedule = build_model(model)
    params = alternating.AlternatingParams(point.eta, point.M, point.L, variant)
    res = alternating.run_transfer(family, schedule, params, midpoint=midpoint)
    f = subspace_fidelity(_ground_space(family, schedule), res.final_state)
    pops = None
    if record_pops:
        decs = _slice_decomps(family, schedule, point.L)
        pops = np.array([populations(d, s) for d, s in zip(decs, res.slice_states)])
    log.info("alternating j=%d k=%d L=%d M=%d T_eff=%.2f F_GS=%.4f",
             point.j, point.k, point.L, point.M, res.effective_time, f)
    return RunRecord(
        "alternating", point.j, point.k, point.L, point.eta, point.M,
        res.effective_time, f, pops,
        res.slice_states if keep_states else None,
        norm_drift=res.norm_drift,
    )


def adiabatic_times(spec: SweepSpec, alt_records: Sequence[RunRecord]) -> list[float]:
    pol = spec.adiabatic_T_policy
    if pol == "none":
        return []
    if pol == "mirror":
        return sorted({r.time for r in alt_records})
    return sorted(set(pol))


def run_adiabatic(spec: SweepSpec, times: Sequence[float]) -> list[RunRecord]:
    if not times:
        return []
    family, schedule = build_model(spec)
    res = adiabatic.propagate_converged(
        family, schedule, times,
        initial_steps=spec.adiabatic_initial_steps,
        tolerance=spec.adiabatic_tolerance,
        max_doublings=spec.adiabatic_max_doublings,
    )
    gs = _ground_space(family, schedule)
    final_dec = family.decompose(schedule(1.0)) if spec.record_populations else None
    out = []
    for i, T in enumerate(res.times):
        psi = res.final_states[:, i]
        if not res.converged[i]:
            log.warning("adiabatic T=%.4g not converged (last deviations %s)",
                        T, res.deviations[i][-2:])
        pops = populations(final_dec, psi)[None, :] if final_dec is not None else None
        f = subspace_fidelity(gs, psi)
        log.info("adiabatic T=%.2f K=%d F_GS=%.4g", T, res.steps[i], f)
        out.append(RunRecord("adiabatic", -1, -1, -1, None, -1, float(T), f, pops,
                             converged=bool(res.converged[i]),
                             norm_drift=float(res.norm_drift[i])))
    return out


def run_sweep(spec: SweepSpec, workers: int = 1, keep_states: bool = False) -> list[RunRecord]:
    """Alternating records in (j, k, L) order followed by adiabatic records by time."""
    grid = resolve_grid(spec)
    build_model(spec)
    jobs = [(spec.model, p, spec.variant, spec.midpoint, spec.record_populations, keep_states)
            for p in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            alt = list(pool.map(_alternating_point, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        alt = [_alternating_point(job) for job in jobs]
    return alt + run_adiabatic(spec, adiabatic_times(spec, alt))


def top_k(records: Sequence[RunRecord], K: int) -> list[RunRecord]:
    """Alternating records by descending F_GS, ties broken by smaller time."""
    if K < 1:
        raise ValueError("K must be >= 1")
    alt = [r for r in records if r.method == "alternating"]
    return sorted(alt, key=lambda r: (-r.F_GS, r.time))[:K]


def population_report(
    record: RunRecord, decompositions: Sequence[SpectralDecomposition]
) -> np.ndarray:
    """Per-slice populations ``(L+1, dim)`` in each slice's ascending eigenbasis."""
    if not record.slice_states:
        raise ValueError("record carries no slice states; rerun with keep_states=True")
    if len(decompositions) != len(record.slice_states):
        raise ValueError(
            f"{len(record.slice_states)} slice states but {len(decompositions)} decompositions"
        )
    return np.array([populations(d, s) for d, s in zip(decompositions, record.slice_states)])


def format_table(records: Sequence[RunRecord]) -> str:
    lines = [f"{'No.':>4}  {'F_GS':>8}  {'T_eff':>9}  {'j':>3}  {'k':>3}  {'L':>3}"]
    for i, r in enumerate(records, 1):
        lines.append(f"{i:>4}  {r.F_GS:>8.4f}  {r.time:>9.2f}  {r.j:>3}  {r.k:>3}  {r.L:>3}")
    return "\n".join(lines) + "\n"


# -- persistence --------------------------------------------------------------


def _fmt(x: float) -> str:
    return repr(float(x))


def write_records(records: Sequence[RunRecord], path, populations_path=None) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RECORD_HEADER)
        for r in records:
            w.writerow([r.method, r.j, r.k, r.L, "" if r.eta is None else _fmt(r.eta),
                        r.M, _fmt(r.time), _fmt(r.F_GS)])
    if populations_path is not None:
        with Path(populations_path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(POPULATION_HEADER)
            for i, r in enumerate(records):
                if r.slice_populations is None:
                    continue
                for s, row in enumerate(r.slice_populations):
                    for idx, p in enumerate(row):
                        w.writerow([i, s, idx, _fmt(p)])


def read_records(path, populations_path=None) -> list[RunRecord]:
    path = Path(path)
    records: list[RunRecord] = []
    with path.open(newline="") as fh:
        rows = csv.reader(fh)
        header = next(rows, None)
        if header != RECORD_HEADER:
            raise RecordFormatError(f"{path}:1: expected header {','.join(RECORD_HEADER)}")
        for lineno, row in enumerate(rows, start=2):
            try:
                if len(row) != len(RECORD_HEADER):
                    raise ValueError(f"expected {len(RECORD_HEADER)} fields, got {len(row)}")
                method, j, k, L, eta, M, t, f = row
                if method not in ("alternating", "adiabatic"):
                    raise ValueError(f"unknown method {method!r}")
                rec = RunRecord(method, int(j), int(k), int(L),
                                None if eta == "" else float(eta), int(M), float(t), float(f))
                if not 0.0 <= rec.F_GS <= 1.0:
                    raise ValueError(f"F_GS {rec.F_GS} outside [0, 1]")
            except ValueError as exc:
                raise RecordFormatError(f"{path}:{lineno}: {exc}") from None
            records.append(rec)
    if populations_path is not None:
        _read_populations(Path(populations_path), records)
    return records


def _read_populations(path: Path, records: list[RunRecord]) -> None:
    cells: dict[int, dict[tuple[int, int], float]] = {}
    with path.open(newline="") as fh:
        rows = csv.reader(fh)
        if next(rows, None) != POPULATION_HEADER:
            raise RecordFormatError(f"{path}:1: expected header {','.join(POPULATION_HEADER)}")
        for lineno, row in enumerate(rows, start=2):
            try:
                rec, s, idx, p = row
                rec, s, idx, p = int(rec), int(s), int(idx), float(p)
                if not 0 <= rec < len(records):
                    raise ValueError(f"record index {rec} out of range")
            except ValueError as exc:
                raise RecordFormatError(f"{path}:{lineno}: {exc}") from None
            cells.setdefault(rec, {})[(s, idx)] = p
    for rec, entries in cells.items():
        n_s = max(s for s, _ in entries) + 1
        n_i = max(i for _, i in entries) + 1
        arr = np.zeros((n_s, n_i))
        for (s, i), p in entries.items():
            arr[s, i] = p
        records[rec].slice_populations = arr


# -- configuration ------------------------------------------------------------

DEFAULT_CONFIG: dict[str, Any] = {
    "grid": {"j": [0, 1, 2, 3, 4, 5], "k": [0, 1, 2, 3, 4, 5], "L": [2, 4, 6, 8],
             "eta_scale": None, "delta_ref": None},
    "variant": "standard",
    "midpoint": False,
    "record_populations": False,
    "adiabatic": {"policy": "mirror", "tolerance": 1e-8, "initial_steps": 8,
                  "max_doublings": 20},
    "output": {"records": "records.csv", "populations": "populations.csv",
               "report": "report.txt", "top": 20},
}


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def apply_override(config: dict, assignment: str) -> None:
    """Apply ``dotted.key=value``; the value is parsed as JSON, else kept as a string."""
    if "=" not in assignment:
        raise ConfigError(f"override {assignment!r} is not of the form key=value")
    key, raw = assignment.split("=", 1)
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = config
    parts = key.strip().split(".")
    for part in parts[:-1]:
        node = node.setdefault(part, {})
        if not isinstance(node, dict):
            raise ConfigError(f"override {key!r} descends into a non-table value")
    node[parts[-1]] = value


def complete_config(raw: dict, overrides: Sequence[str] = ()) -> dict:
    config = _merge(DEFAULT_CONFIG, raw)
    for item in overrides:
        apply_override(config, item)
    if "model" not in config:
        raise ConfigError("config has no model block")
    return config


def load_config(path, overrides: Sequence[str] = ()) -> dict:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be an object")
    return complete_config(raw, overrides)


def spec_from_config(config: dict) -> SweepSpec:
    grid = config["grid"]
    adia = config["adiabatic"]
    pol = adia.get("policy", "mirror")
    if pol == "explicit":
        pol = list(adia.get("times", []))
    try:
        return SweepSpec(
            model=dict(config["model"]),
            j_values=tuple(grid["j"]),
            k_values=tuple(grid["k"]),
            L_values=tuple(grid["L"]),
            eta_scale=grid.get("eta_scale"),
            delta_ref=grid.get("delta_ref"),
            variant=config.get("variant", "standard"),
            adiabatic_T_policy=pol,
            adiabatic_tolerance=float(adia.get("tolerance", 1e-8)),
            adiabatic_initial_steps=int(adia.get("initial_steps", 8)),
            adiabatic_max_doublings=int(adia.get("max_doublings", 20)),
            midpoint=bool(config.get("midpoint", False)),
            record_populations=bool(config.get("record_populations", False)),
        )
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"malformed config: {exc}") from None
