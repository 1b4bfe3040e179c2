"""
Report View - CSV/JSON rendering of results and atomic output files
"""

import json
import logging
import math
import os
import sys
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Union

import numpy as np
import pandas as pd

from models.result_models import GrowthCurve, SimResult, SolveResult
from utils.constants import EXPORT_CONFIG
from utils.errors import ConfigurationError

logger = logging.getLogger(__name__)


def to_jsonable(value: Any) -> Any:
    """Recursively convert results to JSON-safe values; infinities become 'inf', NaN becomes null."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return None
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return value
    return value


class ReportView:
    """
    View component rendering DataFrames and result records as CSV or JSON text
    """

    def __init__(self, fmt: str = "json"):
        """
        Initialize the report view

        Args:
            fmt: Output format, 'csv' or 'json'
        """
        if fmt not in EXPORT_CONFIG['formats']:
            raise ConfigurationError(f"Output format must be one of {EXPORT_CONFIG['formats']}, got '{fmt}'")
        self.fmt = fmt

    # ===== RENDERING =====

    @staticmethod
    def frame_to_csv(df: pd.DataFrame) -> str:
        return df.to_csv(index=False, lineterminator="\n", float_format=EXPORT_CONFIG['csv_float_format'])

    @staticmethod
    def to_json(payload: Any) -> str:
        return json.dumps(to_jsonable(payload), indent=EXPORT_CONFIG['json_indent'], sort_keys=True) + "\n"

    def render_frame(self, df: pd.DataFrame, meta: Optional[Dict] = None) -> str:
        """
        Render a table

        Args:
            df: Table to render
            meta: Extra top-level JSON fields (ignored for CSV)

        Returns:
            CSV text, or JSON {'rows': [...], **meta}
        """
        if self.fmt == "csv":
            return self.frame_to_csv(df)
        payload = {'rows': df.to_dict('records')}
        payload.update(meta or {})
        return self.to_json(payload)

    def render_records(self, records: Union[Dict, List[Dict]]) -> str:
        """Render flat records; CSV gets one row per record."""
        if self.fmt == "csv":
            rows = [records] if isinstance(records, dict) else list(records)
            return self.frame_to_csv(pd.DataFrame([to_jsonable(r) for r in rows]))
        return self.to_json(records)

    def render_curves(self, curves: Iterable[GrowthCurve]) -> str:
        curves = list(curves)
        if self.fmt == "csv":
            frames = [curve.to_dataframe() for curve in curves]
            return self.frame_to_csv(pd.concat(frames, ignore_index=True) if frames else
                                     pd.DataFrame(columns=['f', 'G', 'model_label']))
        return self.to_json({'curves': [curve.to_dict() for curve in curves]})

    def render_solve(self, results: Dict[str, SolveResult]) -> str:
        if self.fmt == "csv":
            rows = [{'model_label': label, **result.to_row()} for label, result in results.items()]
            return self.frame_to_csv(pd.DataFrame(rows))
        return self.to_json({'results': {label: result.to_dict() for label, result in results.items()}})

    def render_simulation(self, result: SimResult) -> str:
        if self.fmt == "csv":
            record = result.to_dict()
            flat = {k: v for k, v in record.items() if not isinstance(v, dict)}
            flat.update({f"growth_{k}": v for k, v in record['per_path_growth'].items()})
            return self.render_records(flat)
        return self.to_json(result.to_dict())

    # ===== OUTPUT =====

    def write(self, text: str, out_path: Optional[Union[str, Path]] = None) -> None:
        """
        Write rendered text to a file atomically, or to stdout when no path is given

        Args:
            text: Rendered output
            out_path: Destination file
        """
        if out_path is None:
            sys.stdout.write(text)
            sys.stdout.flush()
            return

        target = Path(out_path)
        target.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp_name = tempfile.mkstemp(prefix=f".{target.name}.", suffix=".tmp", dir=str(target.parent))
        try:
            with os.fdopen(fd, "w", encoding=EXPORT_CONFIG['encoding'], newline="\n") as handle:
                handle.write(text)
            os.replace(tmp_name, target)
        except BaseException:
            if os.path.exists(tmp_name):
                os.unlink(tmp_name)
            raise
        logger.info(f"Wrote {len(text)} characters to {target}")
