"""File formats: CSV matrices (one sample per line, 17 significant digits)
and JSON metadata/metrics records."""

import json

import numpy as np

from .numerics import as_matrix


def save_matrix(path, M, header=None):
    """Write a p x n matrix as n lines of p comma-separated values.

    Optional header entries become '#'-prefixed 'key: value' lines; the format
    round-trips doubles losslessly (17 significant digits).
    """
    M = as_matrix(M)
    with open(path, "w") as fh:
        if header:
            for key, value in header.items():
                fh.write(f"# {key}: {value}\n")
        for col in M.T:
            fh.write(",".join(f"{v:.17g}" for v in col))
            fh.write("\n")


def load_matrix(path):
    """Read a matrix written by save_matrix, returning the p x n array."""
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rows.append([float(v) for v in line.split(",")])
    if not rows:
        raise ValueError(f"{path} contains no data rows")
    return np.asarray(rows, dtype=float).T


def save_vector(path, v, header=None):
    save_matrix(path, np.asarray(v, dtype=float).reshape(1, -1), header=header)


def load_vector(path):
    return load_matrix(path).ravel()


def save_json(path, record):
    with open(path, "w") as fh:
        json.dump(record, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
