# meanfield/export.py
"""Flat-file outputs: `#`-headed CSV tables, profile/record text files and JSON summaries."""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import pandas as pd

from . import __version__
from .config import Settings, get_settings
from .errors import ParameterError
from .samples import RadialSamples
from .schemas import (
    BlowdownSeries,
    DetCurvePoint,
    ExistenceRow,
    LambdaCurve,
    MassReport,
    ProfileDiagnostics,
    RadialProfile,
    ShootingConfig,
    SolutionRecord,
)
from .utils import config_hash, file_md5

logger = logging.getLogger(__name__)

FLOAT_FORMAT = "%.17g"


def run_header(run: Dict[str, Any], settings: Optional[Settings] = None) -> Dict[str, Any]:
    settings = settings or get_settings()
    return {
        "version": __version__,
        "config_hash": config_hash({"run": run, "settings": settings.model_dump()}),
        **settings.tolerance_header(),
    }


def _header_lines(header: Dict[str, Any]) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in header.items())


def _json_line(key: str, payload) -> str:
    return f"# {key}: {json.dumps(payload, sort_keys=True)}\n"


def write_table(df: pd.DataFrame, path, header: Dict[str, Any], sort_by: Sequence[str] = ()) -> Path:
    path = Path(path)
    if sort_by:
        df = df.sort_values(list(sort_by), kind="mergesort").reset_index(drop=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(_header_lines(header))
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote %s rows=%d md5=%s", path, len(df), file_md5(path))
    return path


def read_table(path) -> pd.DataFrame:
    return pd.read_csv(path, comment="#", float_precision="round_trip")


# -----------------------------
# frames
# -----------------------------
def mass_frame(reports: Iterable[MassReport]) -> pd.DataFrame:
    rows = [
        {
            "gamma": r.gamma, "alpha": r.alpha, "m1": r.m1, "m_gamma": r.m_gamma, "total": r.total,
            "flux_mass": r.flux_mass, "energy_residual": r.energy_residual, "tail_refused": r.tail_refused,
        }
        for r in reports
    ]
    return pd.DataFrame(rows, columns=["gamma", "alpha", "m1", "m_gamma", "total", "flux_mass",
                                       "energy_residual", "tail_refused"])


def curve_frame(curve: LambdaCurve) -> pd.DataFrame:
    rows = [
        {"tau": p.params.tau, "gamma": p.params.gamma, "alpha": p.alpha, "sigma": p.sigma, "lambda_value": p.lambda_value}
        for p in curve.points
    ]
    return pd.DataFrame(rows, columns=["tau", "gamma", "alpha", "sigma", "lambda_value"])


def existence_frame(rows: Iterable[ExistenceRow]) -> pd.DataFrame:
    df = pd.DataFrame([r.model_dump() for r in rows],
                      columns=["tau", "gamma", "lambda_value", "ratio", "found", "min_abs_h", "alpha", "R", "n_roots"])
    return df.rename(columns={"lambda_value": "lambda"})


def det_curve_frame(points: Iterable[DetCurvePoint], tau: float, gamma: float) -> pd.DataFrame:
    rows = [{"tau": tau, "gamma": gamma, **p.model_dump()} for p in points]
    return pd.DataFrame(rows, columns=["tau", "gamma", "alpha", "radius", "lambda_value"])


def blowdown_frame(series: BlowdownSeries) -> pd.DataFrame:
    return pd.DataFrame({
        "delta": series.deltas,
        "ln_inv_delta_sq": [math.log(1.0 / d ** 2) for d in series.deltas],
        "J_value": series.values,
    })


def blowdown_summary(series: BlowdownSeries) -> Dict[str, Any]:
    return {
        "tau": series.params.tau,
        "gamma": series.params.gamma,
        "lambda": series.lambda_value,
        "t_gamma": series.t_gamma.value,
        "t_plus": series.t_gamma.t_plus,
        "t_minus": series.t_gamma.t_minus,
        "branch": series.t_gamma.case,
        "fitted_slope": series.fitted_slope,
        "predicted_slope": series.predicted_slope,
    }


def write_json(payload: Dict[str, Any], path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


# -----------------------------
# profile and record text files
# -----------------------------
def _write_columns(path, head: str, names: List[str], samples: RadialSamples) -> Path:
    df = pd.DataFrame(dict(zip(names, (samples.r, samples.y, samples.dy, samples.d2y))))
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(head)
        df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    logger.debug("wrote %s nodes=%d md5=%s", path, len(df), file_md5(path))
    return Path(path)


def _read_meta(path) -> Dict[str, Any]:
    meta = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            meta[key.strip()] = value.strip()
    return meta


def write_profile(profile: RadialProfile, path, header: Optional[Dict[str, Any]] = None) -> Path:
    head = _header_lines(header or {})
    head += _json_line("config", profile.config.model_dump())
    head += _json_line("diagnostics", profile.diagnostics.model_dump())
    head += f"# beta: {profile.beta_estimate!r}\n"
    head += f"# log_from: {profile.nodes.log_from!r}\n"
    return _write_columns(path, head, ["r", "eta", "eta_prime", "eta_second"], profile.nodes)


def read_profile(path) -> RadialProfile:
    meta = _read_meta(path)
    try:
        config = ShootingConfig(**json.loads(meta["config"]))
        diagnostics = ProfileDiagnostics(**json.loads(meta["diagnostics"]))
        beta = float(meta["beta"])
    except KeyError as e:
        raise ParameterError("profile file is missing a header field", field=str(e), path=str(path))
    df = read_table(path)
    r, eta, deta, d2eta = (df[c].to_numpy() for c in ("r", "eta", "eta_prime", "eta_second"))
    log_from = meta.get("log_from", "None")
    nodes = RadialSamples(r, eta, deta, d2eta, log_from=None if log_from == "None" else float(log_from),
                          laplacian=-config.forcing(eta))
    return RadialProfile(config=config, nodes=nodes, beta_estimate=beta, diagnostics=diagnostics)


def write_record(record: SolutionRecord, path, header: Optional[Dict[str, Any]] = None) -> Path:
    head = _header_lines(header or {})
    head += f"# kind: {record.kind}\n"
    head += _json_line("record", record.model_dump(exclude={"samples", "profile"}))
    return _write_columns(path, head, ["r", "v", "v_prime", "v_second"], record.samples)
