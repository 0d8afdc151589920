"""CSV reading and writing for every file the pipeline touches.

One dialect everywhere: comma separators, '.' decimal point, one header
row, LF line endings. Lines starting with '#' before the header carry
the resolved run configuration, so any output can be traced back to the
exact settings and seed that produced it. Floats are written with repr,
which round-trips exactly and keeps reruns byte-identical.
"""

from pathlib import Path

import numpy as np

from .errors import ParameterError
from .hrv import FEATURE_NAMES, FeatureRecord
from .mlp import Dataset, MlpTopology

__all__ = [
    "format_value",
    "write_table",
    "read_table",
    "read_signal_csv",
    "read_rr_csv",
    "write_features_csv",
    "read_features_csv",
    "write_weights_csv",
    "read_weights_csv",
]


def format_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(path, header, rows, comments=()) -> None:
    """Write one CSV table with optional leading '#' comment lines."""
    lines = [f"# {c}" for c in comments]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_table(path):
    """Read a CSV written by write_table.

    Returns:
        (header, rows, comments) with rows as lists of strings.
    """
    path = Path(path)
    if not path.is_file():
        raise ParameterError(f"no such file: {path}")
    comments = []
    header = None
    rows = []
    for line in path.read_text().splitlines():
        if not line.strip():
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        cells = line.split(",")
        if header is None:
            header = cells
        else:
            rows.append(cells)
    if header is None:
        raise ParameterError(f"{path} has no header row")
    return header, rows, comments


def _read_single_column(path, expected_header: str) -> np.ndarray:
    header, rows, _ = read_table(path)
    if header != [expected_header]:
        raise ParameterError(
            f"{path}: expected header {expected_header!r}, got {','.join(header)!r}"
        )
    try:
        values = np.array([float(r[0]) for r in rows])
    except ValueError as exc:
        raise ParameterError(f"{path}: non-numeric value ({exc})") from None
    if values.size == 0:
        raise ParameterError(f"{path} contains no data rows")
    return values


def read_signal_csv(path) -> np.ndarray:
    """One raw sample per line under a `sample` header."""
    return _read_single_column(path, "sample")


def read_rr_csv(path) -> np.ndarray:
    """One interval in milliseconds per line under a `rr_ms` header."""
    return _read_single_column(path, "rr_ms")


def write_features_csv(path, records, labels, comments=()) -> None:
    """Feature matrix: the 13 named features plus a label column."""
    if len(records) != len(labels):
        raise ParameterError("need one label per feature record")
    header = list(FEATURE_NAMES) + ["label"]
    rows = [
        list(rec.as_vector()) + [int(label)]
        for rec, label in zip(records, labels)
    ]
    write_table(path, header, rows, comments)


def read_features_csv(path) -> Dataset:
    """Load any feature matrix whose last column is the binary label.

    The feature columns need not be the 13 canonical ones; training on
    e.g. a 2-feature toy file goes through the same reader.
    """
    header, rows, _ = read_table(path)
    if header[-1] != "label":
        raise ParameterError(f"{path}: last column must be `label`, got {header[-1]!r}")
    if len(header) < 2:
        raise ParameterError(f"{path}: no feature columns")
    if not rows:
        raise ParameterError(f"{path} contains no data rows")
    try:
        matrix = np.array([[float(c) for c in row] for row in rows])
    except ValueError as exc:
        raise ParameterError(f"{path}: non-numeric value ({exc})") from None
    if matrix.shape[1] != len(header):
        raise ParameterError(f"{path}: ragged rows")
    labels = matrix[:, -1]
    if not np.all(np.isin(labels, (0.0, 1.0))):
        raise ParameterError(f"{path}: labels must be 0 or 1")
    return Dataset(matrix[:, :-1], labels.astype(int))


def write_weights_csv(path, params, topology: MlpTopology, comments=()) -> None:
    """Flat weight vector, one value per line, topology recorded up top."""
    all_comments = [
        "topology=" + ",".join(str(s) for s in topology.layer_sizes)
    ] + list(comments)
    write_table(path, ["weight"], [[float(v)] for v in params], all_comments)


def read_weights_csv(path):
    """Read a weight file back into (params, topology)."""
    header, rows, comments = read_table(path)
    if header != ["weight"]:
        raise ParameterError(f"{path}: expected a single `weight` column")
    topology = None
    for comment in comments:
        if comment.startswith("topology="):
            sizes = comment.split("=", 1)[1].split(",")
            topology = MlpTopology(tuple(int(s) for s in sizes))
    if topology is None:
        raise ParameterError(f"{path}: missing topology comment line")
    params = np.array([float(r[0]) for r in rows])
    if params.shape != (topology.param_count,):
        raise ParameterError(
            f"{path}: {params.size} weights do not fit topology "
            f"{topology.layer_sizes} ({topology.param_count} expected)"
        )
    return params, topology
