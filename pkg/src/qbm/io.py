"""CSV output with '#' manifest headers and flat ``key = value`` config files."""

from __future__ import annotations

import os

import numpy as np

CSV_SCHEMA_VERSION = "1"


def read_config(path) -> dict:
    cfg = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            cfg[key.replace("-", "_")] = value
    return cfg


def format_value(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return ",".join(format_value(x) for x in v)
    return str(v)


def write_manifest(path, manifest: dict):
    with open(path, "w") as fh:
        for k, v in manifest.items():
            if v is not None:
                fh.write(f"{k} = {format_value(v)}\n")


def write_csv(path, columns: dict, manifest: dict | None = None):
    names = list(columns)
    data = [np.atleast_1d(np.asarray(columns[k])) for k in names]
    n = len(data[0])
    if any(len(c) != n for c in data):
        raise ValueError("columns have different lengths")
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        fh.write(f"# schema_version = {CSV_SCHEMA_VERSION}\n")
        for k, v in (manifest or {}).items():
            if v is not None:
                fh.write(f"# {k} = {format_value(v)}\n")
        fh.write(",".join(names) + "\n")
        for i in range(n):
            fh.write(",".join(_cell(c[i]) for c in data) + "\n")


def _cell(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def read_csv(path):
    """Returns (manifest dict, {column: ndarray})."""
    manifest, header, rows = {}, None, []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                if "=" in line:
                    k, v = line[1:].split("=", 1)
                    manifest[k.strip()] = v.strip()
                continue
            if header is None:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    cols = {}
    for j, name in enumerate(header):
        vals = [r[j] for r in rows]
        try:
            cols[name] = np.array([float(v) for v in vals])
        except ValueError:
            cols[name] = np.array(vals)
    return manifest, cols
