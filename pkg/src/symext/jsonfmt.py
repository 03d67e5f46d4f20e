"""Deterministic JSON/CSV float formatting.

All data-stream output prints floats with 17 significant digits, enough to
round-trip IEEE doubles exactly, with '.' as the decimal separator regardless
of locale.
"""

from __future__ import annotations

import json
import math

import numpy as np


def fmt_float(x: float) -> str:
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def dumps(obj) -> str:
    """Serialize to JSON with 17-significant-digit floats.

    Non-finite floats become the strings "nan"/"inf"/"-inf" (plain JSON has no
    encoding for them).
    """
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return fmt_float(x)
        return json.dumps(fmt_float(x))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        if z.imag == 0.0:
            return dumps(z.real)
        return dumps({"re": z.real, "im": z.imag})
    if isinstance(obj, np.ndarray):
        return dumps(obj.tolist())
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps(v) for v in obj) + "]"
    if isinstance(obj, dict):
        items = ",".join(json.dumps(str(k)) + ":" + dumps(v) for k, v in obj.items())
        return "{" + items + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")
