"""Analysis documents and their text, CSV and JSON renderings.

A document is a plain dict. Numbers are rounded once, when the document
is built, so every rendering carries identical values: one decimal for
log-likelihoods and criteria, two for model parameters, four for the
rank-correlation statistics.
"""

import csv
import io
import json
import math
from datetime import datetime, timezone

from . import inference
from .ring import (
    ORDERS,
    Order,
    displacement_distance_correlation,
    distance_matrix,
    distance_table,
    ring_cycle,
)

FORMATS = ("text", "csv", "json")
CSV_COLUMNS = ("model", "loglik", "k", "aicc", "bic", "params")
SCHEMA_VERSION = 1


def _score(x):
    return round(x, 1) if math.isfinite(x) else None


def _param(x):
    return round(x, 2)


def _stat(x):
    return round(x, 4)


def timestamp():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def model_rows(evaluations):
    return [
        {
            "model": e.name,
            "label": e.label,
            "loglik": _score(e.loglik),
            "k": e.k,
            "aicc": _score(e.aic_c),
            "bic": _score(e.bic),
            "params": {name: _param(v) for name, v in e.params.items()},
            "conflict": e.conflict,
        }
        for e in evaluations
    ]


def evaluation_document(evaluations, data, *, dataset="canonical", frequencies="reference",
                        sort="bic", stamp=True):
    return {
        "schema_version": SCHEMA_VERSION,
        "metadata": {
            "dataset": str(dataset),
            "frequencies": str(frequencies),
            "m": data.total,
            "n": data.n,
            "sort": sort,
            "timestamp": timestamp() if stamp else None,
        },
        "models": model_rows(evaluations),
        "best": {
            "aicc": inference.best_by(evaluations, "aicc").name,
            "bic": inference.best_by(evaluations, "bic").name,
        },
    }


def ring_section(base=Order.SOV):
    base = Order.parse(base)
    tau = displacement_distance_correlation(base)
    return {
        "cycle": [o.value for o in ring_cycle()],
        "orders": [o.value for o in ORDERS],
        "distance_matrix": distance_matrix(),
        "displacement_base": base.value,
        "displacement_table": [
            {
                "order": row.order.value,
                "delta_s": row.displacement.s,
                "delta_v": row.displacement.v,
                "delta_o": row.displacement.o,
                "delta": row.displacement.total,
                "d": row.distance,
            }
            for row in distance_table(base)
        ],
        "kendall": {
            "tau": _stat(tau.tau),
            "p_two_sided": _stat(tau.pvalue),
            "p_one_sided": _stat(tau.pvalue_greater),
        },
    }


def penalty_section(evaluations, n):
    rows = []
    for k in sorted({e.k for e in evaluations if e.k >= 1}):
        cmp = inference.penalty_comparison(k, n)
        rows.append({
            "k": k,
            "aic_penalty_rate": _stat(cmp.aic_penalty_rate),
            "bic_penalty_rate": _stat(cmp.bic_penalty_rate),
            "aic_penalty_per_parameter": _stat(cmp.aic_penalty_per_parameter),
            "bic_dominates": cmp.bic_dominates,
        })
    return {"n": n, "threshold_n": math.ceil(math.e ** 2), "rows": rows}


def full_document(evaluations, data, *, base=Order.SOV, **kwargs):
    doc = evaluation_document(evaluations, data, **kwargs)
    doc["ring"] = ring_section(base)
    doc["penalty"] = penalty_section(evaluations, data.n)
    return doc


# -- Rendering -------------------------------------------------------------------


def _fmt(x, missing, spec=".1f"):
    return missing if x is None else format(x, spec)


def _params_text(params, sep=" "):
    return sep.join(f"{k}={v:.2f}" for k, v in params.items())


def render_json(doc):
    return json.dumps(doc, indent=2) + "\n"


def _write_table(writer, doc):
    writer.writerow(CSV_COLUMNS)
    for row in doc["models"]:
        writer.writerow([
            row["model"],
            "" if row["loglik"] is None else row["loglik"],
            row["k"],
            "" if row["aicc"] is None else row["aicc"],
            "" if row["bic"] is None else row["bic"],
            _params_text(row["params"], ";"),
        ])


def render_csv(doc):
    """Model table under the ``model,loglik,k,aicc,bic,params`` header.

    Full reports append further sections (distance matrix, displacement
    table, summary statistics), each with its own header and separated by
    a blank line.
    """
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    _write_table(writer, doc)
    if "ring" in doc:
        ring = doc["ring"]
        writer.writerow([])
        writer.writerow(["order", *ring["orders"]])
        for order, row in zip(ring["orders"], ring["distance_matrix"]):
            writer.writerow([order, *row])
        writer.writerow([])
        writer.writerow(["order", "delta_s", "delta_v", "delta_o", "delta", "d"])
        for row in ring["displacement_table"]:
            writer.writerow([row[c] for c in ("order", "delta_s", "delta_v", "delta_o", "delta", "d")])
    writer.writerow([])
    writer.writerow(["statistic", "value"])
    meta = doc["metadata"]
    for key in ("dataset", "frequencies", "m", "n", "sort", "timestamp"):
        if meta[key] is not None:
            writer.writerow([key, meta[key]])
    writer.writerow(["best_aicc", doc["best"]["aicc"]])
    writer.writerow(["best_bic", doc["best"]["bic"]])
    if "ring" in doc:
        writer.writerow(["ring_cycle", "-".join(doc["ring"]["cycle"])])
        for key, value in doc["ring"]["kendall"].items():
            writer.writerow([f"kendall_{key}", value])
    if "penalty" in doc:
        for row in doc["penalty"]["rows"]:
            k = row["k"]
            writer.writerow([f"aic_penalty_rate_k{k}", row["aic_penalty_rate"]])
            writer.writerow([f"bic_penalty_rate_k{k}", row["bic_penalty_rate"]])
            writer.writerow([f"aic_penalty_per_parameter_k{k}", row["aic_penalty_per_parameter"]])
            writer.writerow([f"bic_dominates_k{k}", row["bic_dominates"]])
    return out.getvalue()


def model_table_text(doc):
    width = max(len("Model"), *(len(r["label"]) for r in doc["models"]))
    lines = [f"{'Model':<{width}}  {'L':>8}  {'k':>2}  {'AIC_c':>7}  {'BIC':>7}  parameters"]
    for r in doc["models"]:
        flag = "  (observed pair with zero probability)" if r["conflict"] else ""
        lines.append(
            f"{r['label']:<{width}}  {_fmt(r['loglik'], '-inf'):>8}  {r['k']:>2}  "
            f"{_fmt(r['aicc'], 'inf'):>7}  {_fmt(r['bic'], 'inf'):>7}  {_params_text(r['params'])}{flag}"
        )
    return lines


def _label(doc, name):
    return next(r["label"] for r in doc["models"] if r["model"] == name)


def ring_text(ring):
    lines = ["Permutation ring: " + " - ".join(ring["cycle"]) + " - " + ring["cycle"][0], ""]
    lines.append("Ring distance d(x, y):")
    lines.append("       " + " ".join(f"{o:>4}" for o in ring["orders"]))
    for order, row in zip(ring["orders"], ring["distance_matrix"]):
        lines.append(f"  {order:<4} " + " ".join(f"{d:>4}" for d in row))
    lines.append("")
    lines.append(f"Total displacement from {ring['displacement_base']}:")
    lines.append("  order  dS  dV  dO  Delta  d")
    for row in ring["displacement_table"]:
        lines.append(
            f"  {row['order']:<5} {row['delta_s']:>3} {row['delta_v']:>3} {row['delta_o']:>3}"
            f" {row['delta']:>6} {row['d']:>2}"
        )
    kt = ring["kendall"]
    lines.append("")
    lines.append(
        f"Kendall tau-b (Delta vs d, n = {len(ring['displacement_table'])}): tau = {kt['tau']:.4f}, "
        f"exact p = {kt['p_two_sided']:.4f} (two-sided), {kt['p_one_sided']:.4f} (one-sided)"
    )
    return lines


def render_text(doc):
    meta = doc["metadata"]
    lines = [f"Dataset: {meta['dataset']} (m = {meta['m']} languages, n = {meta['n']})",
             f"Dominant-order frequencies: {meta['frequencies']}"]
    if meta["timestamp"]:
        lines.append(f"Generated: {meta['timestamp']}")
    lines.append("")
    lines.extend(model_table_text(doc))
    lines.append("")
    lines.append(f"Best by AIC_c: {_label(doc, doc['best']['aicc'])}")
    lines.append(f"Best by BIC: {_label(doc, doc['best']['bic'])}")
    if "ring" in doc:
        lines.append("")
        lines.extend(ring_text(doc["ring"]))
    if "penalty" in doc:
        pen = doc["penalty"]
        lines.append("")
        lines.append(f"Parsimony penalties per parameter at n = {pen['n']}:")
        for row in pen["rows"]:
            lines.append(
                f"  k = {row['k']}: 2/(n-k-1) = {row['aic_penalty_rate']:.4f}, "
                f"ln n = {row['bic_penalty_rate']:.4f}, AIC_c adds 2n/(n-k-1) = "
                f"{row['aic_penalty_per_parameter']:.4f}; BIC dominates: "
                f"{'yes' if row['bic_dominates'] else 'no'}"
            )
    return "\n".join(lines) + "\n"


RENDERERS = {"text": render_text, "csv": render_csv, "json": render_json}


def render(doc, fmt):
    if fmt not in RENDERERS:
        raise ValueError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    return RENDERERS[fmt](doc)
