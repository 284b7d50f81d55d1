import math

import numpy as np


def default(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if not hasattr(obj, 'to_json'):
        raise TypeError(f'Object of type {obj.__class__.__name__} is not JSON serializable')
    return obj.to_json()


# JSON has no infinity, so the singular-loss sentinel is written as null
def finite_or_none(value: float):
    return None if value is None or not math.isfinite(value) else float(value)
