import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import is_dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence

import numpy as np

SCHEMA_VERSION = "isolab/1"
FLOAT_DIGITS = 12

# ------------------------------------------------------
# Stable Report Serialization
# ------------------------------------------------------
def round_float(value: float, digits: int = FLOAT_DIGITS) -> float:
    """Round to a fixed number of significant digits so reports are byte-stable."""
    if value == 0 or not math.isfinite(value):
        return float(value)
    return float(f"{value:.{digits}g}")


def to_jsonable(value: Any) -> Any:
    """
    Convert report payloads into plain JSON types.

    Dataclasses go through their to_dict(), complex numbers become [re, im],
    numpy scalars and arrays become Python numbers and lists.
    """
    if is_dataclass(value) and hasattr(value, "to_dict"):
        return to_jsonable(value.to_dict())
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [round_float(float(value.real)), round_float(float(value.imag))]
    if isinstance(value, (float, np.floating)):
        return round_float(float(value))
    return value


def dump_report(report: Dict[str, Any]) -> str:
    """Serialize a report with sorted keys and the schema tag."""
    payload = dict(to_jsonable(report))
    payload["schema"] = SCHEMA_VERSION
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def dump_csv(columns: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({name: to_jsonable(row.get(name)) for name in columns})
    return buffer.getvalue()


def write_output(text: str, out_path: Optional[str] = None) -> None:
    """Write a rendered report to a file, or to stdout when no path is given."""
    if out_path is None:
        print(text, end="")
        return
    path = Path(out_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


# ------------------------------------------------------
# Randomness
# ------------------------------------------------------
def derive_rng(seed: int, *keys: int) -> np.random.Generator:
    """
    Build an independent generator for the stream named by (seed, *keys).

    The same arguments always give the same stream, regardless of which
    thread asks for it or in which order.
    """
    entropy = [int(seed) & 0xFFFFFFFFFFFFFFFF] + [int(k) & 0xFFFFFFFFFFFFFFFF for k in keys]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def rand_below(rng: np.random.Generator, n: int) -> int:
    """Uniform integer in [0, n) for n up to the modulus cap."""
    return int(rng.integers(0, n, dtype=np.uint64)) if n > 1 else 0


def short_hash(*parts: Any, length: int = 16) -> str:
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode()).hexdigest()
    return digest[:length]


# ------------------------------------------------------
# Deterministic Parallel Map
# ------------------------------------------------------
def ordered_map(func: Callable[[Any], Any], items: Sequence[Any], threads: int = 1) -> List[Any]:
    """Map func over items, keeping input order whatever the thread count."""
    if threads is None or threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
