"""Plain-text tables of verdicts, sweeps and comparisons (see FORMATS.md)."""
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

NOT_DEFINED = "not defined"


def _cell(value: Any, digits: int = 4) -> str:
    if value is None:
        return NOT_DEFINED
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return str(value)


def _table(rows: List[Dict[str, Any]], columns: Sequence[str], digits: int = 4) -> str:
    if not rows:
        return "(no rows)"
    frame = pd.DataFrame([[_cell(row.get(c), digits) for c in columns] for row in rows],
                         columns=list(columns))
    return frame.to_string(index=False)


def verdict_table(verdicts: Sequence[Dict[str, Any]]) -> str:
    """One line per case: feasibility, limitation, gate inputs and headline errors."""
    rows = []
    for verdict in verdicts:
        report = verdict.get("report") or {}
        rows.append({
            "case": verdict["case"],
            "possible": verdict["possible"],
            "limitation": verdict["limitation"],
            "C_f,Ti": verdict.get("crest_ti"),
            "mu_e,I": verdict.get("mu_e_I"),
            "mu_abs": report.get("mu_abs"),
            "sigma": report.get("sigma"),
            "energy_rel_err": report.get("energy_rel_err"),
            "errors": len(verdict.get("errors") or []),
        })
    return _table(rows, ["case", "possible", "limitation", "C_f,Ti", "mu_e,I", "mu_abs", "sigma",
                         "energy_rel_err", "errors"])


def sweep_table(rows: Sequence[Dict[str, Any]]) -> str:
    """Set-point sweep rows as order, identification set points, crest and errors."""
    flat = []
    for row in rows:
        gate = row.get("gate")
        flat.append({
            "order": row["order"],
            "T_h,ID": row["T_h_id"],
            "T_c,ID": row["T_c_id"],
            "C_f,Ti": row.get("crest_ti"),
            "mu_e,I": row.get("mu_e_I"),
            "mu_e,II": row.get("mu_e_II"),
            "sigma_e,II": row.get("sigma_e_II"),
            "gate": None if gate is None else ("pass" if gate["passed"] else "fail"),
            "error": row.get("error") or "",
        })
    return _table(flat, ["order", "T_h,ID", "T_c,ID", "C_f,Ti", "mu_e,I", "mu_e,II", "sigma_e,II",
                         "gate", "error"])


def order_table(rows: Sequence[Dict[str, Any]]) -> str:
    """Validation statistics per model order."""
    flat = []
    for row in rows:
        report = row.get("report") or {}
        flat.append({"order": row["order"], "mu_e": report.get("mu_e"),
                     "sigma_e": report.get("sigma_e"), "fit_percent": report.get("fit_percent"),
                     "error": row.get("error") or ""})
    return _table(flat, ["order", "mu_e", "sigma_e", "fit_percent", "error"])


def comparison_table(report: Dict[str, Any]) -> str:
    """Per-zone error statistics followed by the pooled energy and spectral figures."""
    rows = [dict(stats, zone=zone) for zone, stats in report.get("per_zone", {}).items()]
    lines = [_table(rows, ["zone", "mu_abs", "mu_signed", "sigma"])]
    lines.append(f"energy ref {_cell(report.get('energy_ref_J'))} J, "
                 f"SI {_cell(report.get('energy_si_J'))} J, "
                 f"relative error {_cell(report.get('energy_rel_err'))}")
    lines.append(f"dominant frequency ref {_cell(report.get('peak_freq_ref_hz'))} Hz, "
                 f"SI {_cell(report.get('peak_freq_si_hz'))} Hz")
    return "\n".join(lines)


def render_report(data: Any, title: Optional[str] = None) -> str:
    """
    Render a verdict, sweep, order-sweep or comparison JSON document.

    Raises:
        ValueError: If the document is of none of these kinds
    """
    if isinstance(data, list):
        data = {"kind": "verdicts", "verdicts": data}
    kind = data.get("kind")
    if "case" in data:
        body = verdict_table([data])
        details = data.get("details") or {}
        if data.get("errors"):
            body += "\nerrors:\n" + "\n".join(f"  {e}" for e in data["errors"])
        if details.get("gate") and details["gate"]["reasons"]:
            body += "\ngate:\n" + "\n".join(f"  {r}" for r in details["gate"]["reasons"])
        if data.get("report"):
            body += "\n\n" + comparison_table(data["report"])
    elif kind == "verdicts":
        body = verdict_table(data["verdicts"])
    elif kind == "setpoint_sweep":
        body = sweep_table(data["rows"])
    elif kind == "order_sweep":
        body = order_table(data["rows"])
    elif kind == "comparison":
        body = comparison_table(data)
    else:
        raise ValueError(f"Unrecognized report document (kind={kind!r})")
    return f"{title}\n{'=' * len(title)}\n{body}" if title else body
