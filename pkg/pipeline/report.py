"""
Report rendering: clause table for people, JSON tree for machines
"""

import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, Optional, TextIO, Union

import numpy as np

from core.errors import InvalidParameter, ReportWriteError
from pipeline.verification_pipeline import VerificationReport

logger = logging.getLogger(__name__)

FORMATS = ("text", "structured")

CLAUSE_LABELS = {
    "ground_energy_zero": "ground energy",
    "degeneracy_N_plus_1": "degeneracy",
    "max_total_spin": "clause a",
    "pairwise_alignment": "clause b",
    "product_state_span": "clause c",
    "rotation_closure": "rotation closure",
    "lemma_pair": "lemma",
    "edge_psd": "edge psd",
    "exclusion_arithmetic": "exclusion arithmetic",
}


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Not serializable: {type(value).__name__}")


def to_structured(payload: Union[VerificationReport, Dict[str, Any]], include_timings: bool = False) -> str:
    tree = payload.to_dict(include_timings) if isinstance(payload, VerificationReport) else payload
    return json.dumps(tree, indent=2, ensure_ascii=False, allow_nan=False, default=_json_default) + "\n"


def render_text(report: VerificationReport, include_timings: bool = False) -> str:
    graph = report.graph
    lines = [
        f"Graph: N={graph['n']}, |E|={len(graph['edges'])}",
        "-" * 60,
    ]
    for clause in report.clauses:
        label = CLAUSE_LABELS.get(clause.name, clause.name)
        verdict = "PASS" if clause.passed else "FAIL"
        line = f"{label}: {verdict} (max dev {clause.evidence.get('max_dev', 0.0):.1e})"
        if clause.name == "degeneracy_N_plus_1":
            line += f" degeneracy {clause.evidence['dimension']} (expected {clause.evidence['expected']})"
        if clause.name == "lemma_pair":
            line += f" pair {tuple(clause.evidence['pair'])}, removable {clause.evidence['removable_count']}"
        if include_timings:
            line += f" [{clause.elapsed_ms:.1f} ms]"
        lines.append(line)
    lines.append("-" * 60)
    lines.append(f"Overall: {'PASS' if report.passed else 'FAIL'}")
    return "\n".join(lines) + "\n"


def render_summary_text(payload: Dict[str, Any]) -> str:
    """Plain key/value rendering for spectrum, lemma and sweep results."""
    lines = []
    for key, value in payload.items():
        if key == "sectors" and isinstance(value, list):
            lines.append("sectors:")
            for sector in value:
                values = ", ".join(f"{v:.6g}" for v in sector.get("eigenvalues", []))
                lines.append(f"  k={sector['k']:>2} [{sector['mode']}]: {values}"
                             f" (max residual {sector.get('max_residual', 0.0):.1e})")
        elif key == "graph":
            lines.append(f"graph: N={value['n']}, |E|={len(value['edges'])}")
        else:
            lines.append(f"{key}: {value}")
    return "\n".join(lines) + "\n"


def emit_report(payload: Union[VerificationReport, Dict[str, Any]], fmt: str = "text",
                sink: Optional[Union[str, Path, TextIO]] = None, include_timings: bool = False) -> None:
    """Write a report to a path, an open stream, or standard output."""
    if fmt not in FORMATS:
        raise InvalidParameter(f"Unknown report format '{fmt}'. Supported: {', '.join(FORMATS)}")

    if fmt == "structured":
        content = to_structured(payload, include_timings)
    elif isinstance(payload, VerificationReport):
        content = render_text(payload, include_timings)
    else:
        content = render_summary_text(payload)

    try:
        if sink is None:
            sys.stdout.write(content)
        elif isinstance(sink, (str, Path)):
            with open(sink, 'w', encoding='utf-8') as f:
                f.write(content)
            logger.info(f"Report written to {sink}")
        else:
            sink.write(content)
    except (OSError, io.UnsupportedOperation) as e:
        raise ReportWriteError(f"Failed to write report to {sink}: {e}") from e
