"""Data loading, run configuration, batch evaluation and report serialization."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Union

import numpy as np

from .core import (
    CRS,
    DataError,
    Evaluation,
    Orientation,
    ReturnsToScale,
    Technology,
    ZeroAdjustmentLog,
    preprocess_zeros,
    require_valid,
)
from .lo import solve_lo
from .qo import BISECTION_TOL, solve_qo

TABLE_DECIMALS = 6


# -- input ----------------------------------------------------------------------


def read_csv(source: Union[str, Path, io.TextIOBase], rts: ReturnsToScale = CRS) -> Technology:
    """Technology from a CSV with header ``dmu,i:<name>...,o:<name>...``.

    Parsing problems are collected and raised together as one :class:`DataError`.
    """
    if isinstance(source, (str, Path)):
        with open(source, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    else:
        rows = list(csv.reader(source))
    rows = [r for r in rows if any(c.strip() for c in r)]
    if not rows:
        raise DataError("empty data file", ["empty data file"])
    header = [h.strip() for h in rows[0]]
    problems = []
    if not header or header[0].lower() != "dmu":
        problems.append("first column must be 'dmu'")
    kinds = []
    for h in header[1:]:
        if h.startswith("i:"):
            kinds.append(("i", h[2:]))
        elif h.startswith("o:"):
            kinds.append(("o", h[2:]))
        else:
            problems.append(f"column {h!r} needs an 'i:' or 'o:' prefix")
    if problems:
        raise DataError("; ".join(problems), problems)
    in_cols = [k for k, (kind, _) in enumerate(kinds) if kind == "i"]
    out_cols = [k for k, (kind, _) in enumerate(kinds) if kind == "o"]
    if not in_cols or not out_cols:
        msg = "data need at least one input and one output column"
        raise DataError(msg, [msg])
    names, values = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            problems.append(f"line {lineno}: expected {len(header)} fields, got {len(row)}")
            continue
        names.append(row[0].strip())
        vals = []
        for h, cell in zip(header[1:], row[1:]):
            try:
                vals.append(float(cell))
            except ValueError:
                problems.append(f"line {lineno}: {h} value {cell.strip()!r} is not a number")
                vals.append(np.nan)
        values.append(vals)
    if len(set(names)) != len(names):
        problems.append("DMU names must be unique")
    if not values:
        problems.append("no DMU rows")
    if problems:
        raise DataError("; ".join(problems), problems)
    V = np.array(values, dtype=float)
    return Technology(
        V[:, in_cols].T,
        V[:, out_cols].T,
        names=tuple(names),
        rts=rts,
        input_names=tuple(kinds[k][1] for k in in_cols),
        output_names=tuple(kinds[k][1] for k in out_cols),
    )


def write_csv(tech: Technology, path: Union[str, Path]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["dmu", *(f"i:{n}" for n in tech.input_names), *(f"o:{n}" for n in tech.output_names)])
        for j, name in enumerate(tech.names):
            w.writerow([name, *(repr(float(v)) for v in tech.X[:, j]), *(repr(float(v)) for v in tech.Y[:, j])])


def five_unit_example() -> Technology:
    """The five-DMU, two-input, two-output example technology shipped with the package."""
    return read_csv(Path(__file__).with_name("data") / "five_units.csv")


# -- configuration --------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    model: str = "lo"
    orient: Orientation | None = None
    rts: ReturnsToScale = CRS
    second_stage: bool = True
    zero_output_policy: Union[str, Mapping[str, str]] = "potential"
    qo_force_bisection: bool = False
    bisection_tol: float = BISECTION_TOL
    round: int | None = None

    def __post_init__(self):
        if self.model not in ("lo", "qo", "both"):
            raise ValueError(f"model must be lo, qo or both, not {self.model!r}")

    @property
    def models(self) -> tuple[str, ...]:
        return ("lo", "qo") if self.model == "both" else (self.model,)

    def orientation_for(self, tech: Technology) -> Orientation:
        return self.orient if self.orient is not None else Orientation.uniform(tech.m, tech.s)

    @classmethod
    def from_mapping(cls, data: Mapping) -> "RunConfig":
        """Config from a JSON-like mapping; unknown keys are an error."""
        known = {"model", "orient", "rts", "second_stage", "zero_output_policy",
                 "qo_force_bisection", "tolerances", "round"}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        kw = {}
        if "model" in data:
            kw["model"] = str(data["model"]).lower()
        if "orient" in data:
            kw["orient"] = parse_orientation(data["orient"])
        if "rts" in data:
            kw["rts"] = ReturnsToScale.parse(str(data["rts"]))
        if "second_stage" in data:
            kw["second_stage"] = parse_switch(data["second_stage"])
        if "zero_output_policy" in data:
            kw["zero_output_policy"] = data["zero_output_policy"]
        if "qo_force_bisection" in data:
            kw["qo_force_bisection"] = bool(data["qo_force_bisection"])
        if "round" in data and data["round"] is not None:
            kw["round"] = int(data["round"])
        tols = data.get("tolerances") or {}
        if "bisection" in tols:
            kw["bisection_tol"] = float(tols["bisection"])
        return cls(**kw)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.from_mapping(json.load(fh))

    def with_overrides(self, **flags) -> "RunConfig":
        """Copy with every non-``None`` flag applied (flags win over the file)."""
        return replace(self, **{k: v for k, v in flags.items() if v is not None})


def parse_switch(v) -> bool:
    if isinstance(v, bool):
        return v
    text = str(v).strip().lower()
    if text in ("on", "true", "yes", "1"):
        return True
    if text in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got {v!r}")


def parse_orientation(spec) -> Orientation:
    """Orientation from ``"d1,..,dm:d1,..,ds"``, a path to a file holding that text, or a mapping."""
    if isinstance(spec, Orientation):
        return spec
    if isinstance(spec, Mapping):
        return Orientation(np.asarray(spec["d_minus"], float), np.asarray(spec["d_plus"], float))
    text = str(spec).strip()
    if ":" not in text and Path(text).is_file():
        text = Path(text).read_text(encoding="utf-8").strip()
    return Orientation.parse(text)


def parse_zero_policy(text: str):
    """``"potential"``, ``"impossible"`` or per-output overrides ``"y1=impossible,y2=potential"``."""
    text = text.strip()
    if "=" not in text:
        return text
    out = {}
    for part in text.split(","):
        k, _, v = part.partition("=")
        out[k.strip()] = v.strip()
    return out


# -- evaluation -----------------------------------------------------------------


def thread_count() -> int | None:
    """Worker cap from ``DEAORIENT_THREADS``; ``None`` (auto) when unset or 0."""
    raw = os.environ.get("DEAORIENT_THREADS", "").strip()
    if not raw:
        return None
    k = int(raw)
    if k < 0:
        raise ValueError("DEAORIENT_THREADS must be >= 0")
    return k or None


@dataclass
class Run:
    tech: Technology
    config: RunConfig
    log: ZeroAdjustmentLog
    evaluations: dict = field(default_factory=dict)  # model -> list[Evaluation]


def evaluate_dmus(tech: Technology, config: RunConfig) -> Run:
    """Evaluate every DMU of ``tech`` with the configured model(s).

    The technology is validated, its returns to scale replaced by the
    config's, and zeros preprocessed. DMU evaluations run in a thread pool;
    results keep input order.
    """
    tech = tech.with_rts(config.rts)
    require_valid(tech)
    tech, log = preprocess_zeros(tech, config.zero_output_policy)
    d = config.orientation_for(tech)
    if d.d_minus.size != tech.m or d.d_plus.size != tech.s:
        msg = f"orientation has {d.d_minus.size}:{d.d_plus.size} coefficients, data have {tech.m}:{tech.s}"
        raise DataError(msg, [msg])

    def one(model, j):
        if model == "lo":
            return solve_lo(tech, j, d, second_stage=config.second_stage, log=log)
        method = "bisection" if config.qo_force_bisection else "auto"
        return solve_qo(tech, j, d, method=method, second_stage=config.second_stage,
                        log=log, tol=config.bisection_tol)

    run = Run(tech, config, log)
    workers = thread_count()
    for model in config.models:
        if workers == 1:
            run.evaluations[model] = [one(model, j) for j in range(tech.n)]
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                run.evaluations[model] = list(pool.map(lambda j: one(model, j), range(tech.n)))
    return run


# -- reports --------------------------------------------------------------------


def _vec(a) -> list[float]:
    return [float(v) for v in np.asarray(a)]


def evaluation_record(ev: Evaluation) -> dict:
    """Plain-data view of an evaluation, full precision."""
    rec = {
        "dmu": ev.dmu,
        "model": ev.model,
        "method": ev.method,
        "beta": float(ev.beta),
        "rho": float(ev.rho),
        "theta": _vec(ev.theta),
        "phi": _vec(ev.phi),
        "tau_minus": _vec(ev.tau_minus),
        "tau_plus": _vec(ev.tau_plus),
        "target": {"x": _vec(ev.target.x), "y": _vec(ev.target.y)},
        "projection": {"x": _vec(ev.projection.x), "y": _vec(ev.projection.y)},
        "s_minus": _vec(ev.s_minus),
        "s_plus": _vec(ev.s_plus),
        "lambda": None if ev.lambda_star is None else _vec(ev.lambda_star),
        "max_slack": ev.max_slack,
        "notes": list(ev.notes),
    }
    if ev.sensitivity is not None:
        rec["sensitivity"] = {"x": _vec(ev.sensitivity.x + 0.0), "y": _vec(ev.sensitivity.y + 0.0)}
    return rec


def report_document(run: Run) -> dict:
    tech, cfg = run.tech, run.config
    return {
        "config": {
            "model": cfg.model,
            "orient": str(cfg.orientation_for(tech)),
            "rts": str(tech.rts),
            "second_stage": "on" if cfg.second_stage else "off",
            "zero_output_policy": cfg.zero_output_policy,
            "qo_force_bisection": cfg.qo_force_bisection,
        },
        "inputs": list(tech.input_names),
        "outputs": list(tech.output_names),
        "dmus": list(tech.names),
        "zero_adjustments": run.log.entries(),
        "results": {m: [evaluation_record(ev) for ev in evs] for m, evs in run.evaluations.items()},
    }


def report_json(run: Run) -> str:
    return json.dumps(report_document(run), indent=2)


def table_columns(tech: Technology) -> list[str]:
    cols = ["model", "dmu", "beta", "rho"]
    cols += [f"target:{n}" for n in tech.input_names + tech.output_names]
    cols += [f"projection:{n}" for n in tech.input_names + tech.output_names]
    return cols


def fmt(v: float, decimals: int) -> str:
    out = f"{v:.{decimals}f}"
    return "0." + "0" * decimals if float(out) == 0 else out  # no "-0.000000"


def report_table(run: Run, decimals: int | None = None) -> str:
    """Fixed-decimal CSV table, one row per model and DMU in input order."""
    decimals = TABLE_DECIMALS if decimals is None else decimals
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table_columns(run.tech))
    for model, evs in run.evaluations.items():
        for ev in evs:
            nums = [ev.beta, ev.rho, *ev.target.x, *ev.target.y, *ev.projection.x, *ev.projection.y]
            w.writerow([model, ev.dmu, *(fmt(float(v), decimals) for v in nums)])
    return buf.getvalue()


# -- bar data -------------------------------------------------------------------


BAR_COLUMNS = ("variable", "kind", "orientation_coeff", "factor", "relative_slack", "inverse_factor")


def emit_bars(ev: Evaluation, input_names=None, output_names=None) -> list[dict]:
    """One row per variable for contraction/dilation bar charts.

    Inputs have kind ``contraction`` with factor ``theta``; outputs have kind
    ``dilation`` with factor ``phi`` and also carry ``1/phi``. The bar length
    is the relative slack ``tau``.
    """
    m, s = ev.subject.m, ev.subject.s
    input_names = input_names or [f"x{i + 1}" for i in range(m)]
    output_names = output_names or [f"y{r + 1}" for r in range(s)]
    rows = []
    for i in range(m):
        rows.append({
            "variable": input_names[i],
            "kind": "contraction",
            "orientation_coeff": float(ev.orientation.d_minus[i]),
            "factor": float(ev.theta[i]),
            "relative_slack": float(ev.tau_minus[i]),
            "inverse_factor": None,
        })
    for r in range(s):
        rows.append({
            "variable": output_names[r],
            "kind": "dilation",
            "orientation_coeff": float(ev.orientation.d_plus[r]),
            "factor": float(ev.phi[r]),
            "relative_slack": float(ev.tau_plus[r]),
            "inverse_factor": float(1.0 / ev.phi[r]),
        })
    return rows


def bars_table(run: Run, decimals: int | None = None) -> str:
    decimals = TABLE_DECIMALS if decimals is None else decimals
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("model", "dmu") + BAR_COLUMNS)
    for model, evs in run.evaluations.items():
        for ev in evs:
            for row in emit_bars(ev, run.tech.input_names, run.tech.output_names):
                w.writerow([
                    model, ev.dmu, row["variable"], row["kind"],
                    *(fmt(row[k], decimals) if row[k] is not None else ""
                      for k in ("orientation_coeff", "factor", "relative_slack", "inverse_factor")),
                ])
    return buf.getvalue()
