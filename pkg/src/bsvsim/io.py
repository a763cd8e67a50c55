"""CSV and JSON formats.

Every CSV starts with one ``# config: {...}`` comment line holding the
scenario as canonical JSON, so a file alone is enough to replay a run.
Floats use shortest round-trip repr and keys are sorted, which keeps
reruns byte-identical.
"""
import csv
import io as _io
import json
import math
from pathlib import Path

import numpy as np

from .detection import DeltaHistogram, JointCountDistribution
from .errors import DomainError
from .sampling import SampleBatch

CONFIG_PREFIX = "# config: "


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        # JSON has no inf/nan
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def dumps(obj):
    return json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj):
    Path(path).write_text(dumps(obj))
    return Path(path)


def read_json(path):
    return json.loads(Path(path).read_text())


def _write_table(path, config, header, rows):
    buf = _io.StringIO()
    if config is not None:
        buf.write(CONFIG_PREFIX + json.dumps(_plain(config), sort_keys=True) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    Path(path).write_text(buf.getvalue())
    return Path(path)


def _fmt(x):
    return repr(float(x))


def _read_table(path):
    """Returns (config or None, header, rows)."""
    config = None
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith(CONFIG_PREFIX):
                config = json.loads(line[len(CONFIG_PREFIX):])
            elif line.startswith("#") or not line.strip():
                continue
            else:
                lines.append(line)
    if not lines:
        raise DomainError(f"{path}: no data")
    reader = csv.reader(lines)
    header = [h.strip() for h in next(reader)]
    return config, header, [r for r in reader if r]


def _columns(path, expected):
    config, header, rows = _read_table(path)
    if header != expected:
        raise DomainError(f"{path}: expected columns {expected}, got {header}")
    return config, rows


# joint tables ----------------------------------------------------------------

def write_joint_csv(path, dist, config=None):
    rows = [(m1, m2, _fmt(p)) for m1, m2, p in dist.entries()]
    return _write_table(path, config, ["m1", "m2", "probability"], rows)


def read_joint_csv(path):
    config, rows = _columns(path, ["m1", "m2", "probability"])
    idx = np.array([(int(a), int(b)) for a, b, _ in rows], dtype=np.int64).reshape(-1, 2)
    probs = np.array([float(p) for *_, p in rows])
    shape = (int(idx[:, 0].max()) + 1, int(idx[:, 1].max()) + 1) if len(rows) else (1, 1)
    table = np.zeros(shape)
    table[idx[:, 0], idx[:, 1]] = probs
    return JointCountDistribution(table, max(0.0, 1.0 - math.fsum(probs)), config or {})


def write_histogram_csv(path, hist, config=None):
    rows = [(_fmt(c), _fmt(m)) for c, m in zip(hist.bin_centers, hist.masses)]
    return _write_table(path, config, ["bin_center", "mass"], rows)


def read_histogram_csv(path):
    config, rows = _columns(path, ["bin_center", "mass"])
    centers = np.array([float(c) for c, _ in rows])
    masses = np.array([float(m) for _, m in rows])
    half = (centers[1] - centers[0]) / 2.0 if centers.size > 1 else 1.0
    edges = np.append(centers - half, centers[-1] + half)
    return DeltaHistogram(edges, masses, (config or {}).get("min_total", 1),
                          max(0.0, 1.0 - math.fsum(masses)), config or {})


# samples ---------------------------------------------------------------------

def write_batch(path, batch, config=None):
    """CSV of (trial, m1, m2) plus a JSON sidecar with seed and scenario."""
    path = Path(path)
    buf = _io.StringIO()
    if config is not None:
        buf.write(CONFIG_PREFIX + json.dumps(_plain(config), sort_keys=True) + "\n")
    buf.write("trial,m1,m2\n")
    data = np.column_stack([np.arange(batch.trials), batch.pairs])
    np.savetxt(buf, data, fmt="%d", delimiter=",")
    path.write_text(buf.getvalue())
    sidecar = path.with_suffix(".json")
    write_json(sidecar, {"seed": batch.seed, "trials": batch.trials,
                         "scenario": batch.scenario, "config": config})
    return path, sidecar


def read_batch(path):
    path = Path(path)
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0].strip() != "trial,m1,m2":
        raise DomainError(f"{path}: expected columns trial,m1,m2")
    data = np.loadtxt(lines[1:], delimiter=",", dtype=np.int64, ndmin=2)
    sidecar = path.with_suffix(".json")
    meta = read_json(sidecar) if sidecar.exists() else {}
    return SampleBatch(data[:, 1:], meta.get("seed", 0), meta.get("scenario", {}))


# inputs ----------------------------------------------------------------------

def read_gamma_csv(path):
    """(i, j, re, im) rows -> list of (i, j, complex)."""
    _, header, rows = _read_table(path)
    if header != ["i", "j", "re", "im"]:
        raise DomainError(f"{path}: expected columns i,j,re,im, got {header}")
    out = []
    for r in rows:
        i, j = int(r[0]), int(r[1])
        if i < 0 or j < 0:
            raise DomainError(f"{path}: negative index ({i}, {j})")
        out.append((i, j, complex(float(r[2]), float(r[3]))))
    return out


def read_power_csv(path):
    """(power_mW, photons) rows."""
    _, header, rows = _read_table(path)
    if header != ["power_mW", "photons"]:
        raise DomainError(f"{path}: expected columns power_mW,photons, got {header}")
    try:
        return [(float(p), float(n)) for p, n in rows]
    except ValueError as exc:
        raise DomainError(f"{path}: {exc}") from None


def write_plot_data(path, series, config=None):
    """Long-format (series, x, y) CSV; ``series`` maps name -> (xs, ys)."""
    rows = []
    for name in sorted(series):
        xs, ys = series[name]
        rows.extend((name, _fmt(x), _fmt(y)) for x, y in zip(xs, ys))
    return _write_table(path, config, ["series", "x", "y"], rows)


def write_rows(path, header, rows, config=None):
    fmt_rows = [[_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r] for r in rows]
    return _write_table(path, config, header, fmt_rows)
