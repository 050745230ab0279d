"""Result files.

JSON is the canonical, lossless format: keys sorted, floats written with
``repr`` so they parse back to the identical double. CSV is a flat,
plot-ready variant; its metadata (resolved config, fit, optimum, totals)
sits in ``# key=<json>`` comment lines above the table.
"""

import csv
import io
import json

from .revenue import SetOutcome
from .sweep import Optimum, PolynomialFit, SweepPoint, SweepResult


class ResultFormatError(ValueError):
    """A result file is unreadable or lacks required fields."""


def dumps_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2, allow_nan=False) + "\n"


def sweep_payload(result: SweepResult, config: dict) -> dict:
    out = {
        "kind": "sweep",
        "config": config,
        "master_seed": config["master_seed"],
        "n_users": result.n_users,
        "points": [
            {"n_servers": p.n_servers, "mean_revenue": p.mean, "stddev": p.stddev, "trials": p.trials}
            for p in result.points
        ],
        "fit": None if result.fit is None else result.fit.to_dict(),
        "optimum": None,
    }
    if result.optimum is not None:
        o = result.optimum
        out["optimum"] = {"n_servers": o.n_servers, "ratio": o.ratio, "revenue": o.revenue,
                          "m_continuous": o.m_continuous, "at_endpoint": o.at_endpoint}
    return out


def sweep_from_payload(payload) -> SweepResult:
    try:
        points = tuple(SweepPoint(p["n_servers"], p["mean_revenue"], p["stddev"], p["trials"])
                       for p in payload["points"])
        fit = payload.get("fit")
        fit = None if fit is None else PolynomialFit.from_dict(fit)
        opt = payload.get("optimum")
        opt = None if opt is None else Optimum(opt["n_servers"], opt["ratio"], opt["revenue"],
                                               opt["m_continuous"], opt["at_endpoint"])
        return SweepResult(payload["n_users"], points, fit, opt)
    except (KeyError, TypeError) as exc:
        raise ResultFormatError(f"malformed sweep result: {exc!r}") from None


def simulate_payload(outcomes, total, n_users, n_servers, config: dict) -> dict:
    return {
        "kind": "simulate",
        "config": config,
        "master_seed": config["master_seed"],
        "n_users": n_users,
        "n_servers": n_servers,
        "total_revenue": total,
        "outcomes": [o.to_dict() for o in outcomes],
    }


def outcomes_from_payload(payload):
    try:
        return [SetOutcome.from_dict(d) for d in payload["outcomes"]]
    except (KeyError, TypeError) as exc:
        raise ResultFormatError(f"malformed simulate result: {exc!r}") from None


def _csv_meta(meta: dict) -> str:
    return "".join(f"# {k}={json.dumps(v, sort_keys=True, allow_nan=False)}\n" for k, v in meta.items())


def dumps_csv(payload) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    if payload["kind"] == "sweep":
        meta = {k: payload[k] for k in ("kind", "config", "master_seed", "n_users", "fit", "optimum")}
        w.writerow(["n_servers", "mean_revenue", "stddev", "trials"])
        for p in payload["points"]:
            w.writerow([p["n_servers"], repr(p["mean_revenue"]), repr(p["stddev"]), p["trials"]])
    else:
        meta = {k: payload[k] for k in ("kind", "config", "master_seed", "n_users", "n_servers",
                                        "total_revenue")}
        w.writerow(["server_id", "set_size", "status", "winner_id", "revenue", "user_ids", "bids"])
        for o in payload["outcomes"]:
            w.writerow([o["server_id"], o["set_size"], o["status"],
                        "" if o["winner_id"] is None else o["winner_id"], repr(o["revenue"]),
                        ";".join(map(str, o["user_ids"])), ";".join(map(repr, o["bids"]))])
    return _csv_meta(meta) + buf.getvalue()


def loads_csv(text) -> dict:
    meta_lines = [ln for ln in text.splitlines() if ln.startswith("# ")]
    body = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
    payload = {}
    for ln in meta_lines:
        key, _, value = ln[2:].partition("=")
        payload[key] = json.loads(value)
    rows = list(csv.DictReader(body))
    if payload.get("kind") == "sweep":
        payload["points"] = [
            {"n_servers": int(r["n_servers"]), "mean_revenue": float(r["mean_revenue"]),
             "stddev": float(r["stddev"]), "trials": int(r["trials"])}
            for r in rows
        ]
    elif payload.get("kind") == "simulate":
        payload["outcomes"] = [
            {"server_id": int(r["server_id"]), "set_size": int(r["set_size"]), "status": r["status"],
             "winner_id": int(r["winner_id"]) if r["winner_id"] else None,
             "revenue": float(r["revenue"]),
             "user_ids": [int(u) for u in r["user_ids"].split(";") if u],
             "bids": [float(b) for b in r["bids"].split(";") if b]}
            for r in rows
        ]
    else:
        raise ResultFormatError("CSV result lacks a '# kind=' line")
    return payload


def dumps(payload, fmt) -> str:
    return dumps_json(payload) if fmt == "json" else dumps_csv(payload)


def write_result(path, payload, fmt="json"):
    text = dumps(payload, fmt)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def read_result(path) -> dict:
    """Load a JSON or CSV result file (detected from its content)."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        if text.lstrip().startswith("{"):
            payload = json.loads(text)
        else:
            payload = loads_csv(text)
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ResultFormatError):
            raise
        raise ResultFormatError(f"cannot parse {path}: {exc}") from None
    if not isinstance(payload, dict) or "kind" not in payload:
        raise ResultFormatError(f"{path} is not a result file")
    return payload
