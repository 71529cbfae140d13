"""csv and json report writers.

files are written atomically (temp file in the target directory, then
os.replace). csv floats carry 17 significant digits, json floats use the
shortest round-trip repr; either way reruns with a fixed seed give
byte-identical reports.
"""
import csv
import io
import json
import math
import os
import tempfile
from dataclasses import asdict, is_dataclass

import numpy as np

SWEEP_COLUMNS = ["N", "max_error", "mean_error", "runtime_ms"]
INVARIANCE_COLUMNS = ["beta_re", "beta_im", "dim_H_beta", "in_space", "max_residual"]
CERTIFY_COLUMNS = ["n", "z_re", "z_im", "c_re", "c_im"]


def format_float(x):
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def to_jsonable(obj):
    """plain json types; complex as [re, im], non-finite floats as strings."""
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [to_jsonable(obj.real), to_jsonable(obj.imag)]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else format_float(x)
    return obj


def write_atomic(path, text):
    """write text to path through a temp file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as f:
            f.write(text)
        os.replace(tmp, path)
    except Exception:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path, columns, rows):
    """header plus one line per row; header only when rows is empty."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    write_atomic(path, buffer.getvalue())


def write_json(path, payload):
    text = json.dumps(to_jsonable(payload), indent=2, sort_keys=True)
    write_atomic(path, text + "\n")


def sweep_rows(rows):
    return [[r.N, r.max_error, r.mean_error, r.runtime_ms] for r in rows]


def invariance_rows(reports):
    return [
        [r.beta.real, r.beta.imag, r.dim_H_beta, r.all_shifts_in_space, r.max_residual]
        for r in reports
    ]


def certify_rows(S):
    return [
        [n, z.real, z.imag, c.real, c.imag]
        for n, (z, c) in enumerate(zip(S.nodes, S.coefficients))
    ]


def battery_payload(name, passed, details=None, error=None):
    """one battery result, shaped like a call response."""
    payload = {"battery": name, "status": "pass" if passed else "fail"}
    if details is not None:
        payload["result"] = details
    if error is not None:
        payload["error"] = {"type": type(error).__name__, "message": str(error)}
    return payload
