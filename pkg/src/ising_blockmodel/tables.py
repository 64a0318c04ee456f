"""CSV and JSON emitters/readers.

Every CSV written here starts with one ``#``-prefixed JSON line carrying the
metadata needed to reproduce it, so files are self-describing.
"""
import csv
import io
import json

import numpy as np

from .model import ModelParams, Partition


def _format(value):
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_table(stream, columns, rows, header=None):
    if header is not None:
        stream.write("# " + json.dumps(header, sort_keys=True) + "\n")
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_format(row[c]) for c in columns])


def read_table(stream):
    """Returns (header dict or None, list of dict rows with string values)."""
    lines = stream.read().splitlines()
    header = None
    if lines and lines[0].startswith("#"):
        header = json.loads(lines[0][1:])
        lines = lines[1:]
    reader = csv.DictReader(lines)
    return header, list(reader)


def table_to_string(columns, rows, header=None):
    buf = io.StringIO()
    write_table(buf, columns, rows, header)
    return buf.getvalue()


def write_samples(stream, batch):
    header = {
        **batch.params.to_dict(),
        "n": batch.n,
        "seed": batch.seed,
        "partition": batch.partition.to_string(),
    }
    stream.write("# " + json.dumps(header, sort_keys=True) + "\n")
    for row in batch.configs:
        stream.write(",".join(str(int(x)) for x in row) + "\n")


def read_samples(stream):
    """Returns (configs as int8 array, header dict or None)."""
    text = stream.read()
    lines = text.splitlines()
    header = None
    if lines and lines[0].startswith("#"):
        header = json.loads(lines[0][1:])
    body = [ln for ln in lines if ln.strip() and not ln.startswith("#")]
    if not body:
        raise ValueError("sample file contains no configurations")
    configs = np.array([[int(x) for x in ln.split(",")] for ln in body], dtype=np.int8)
    if not np.isin(configs, (-1, 1)).all():
        raise ValueError("sample file must contain +-1 spins only")
    return configs, header


def header_params(header):
    return ModelParams(header["alpha"], header["beta"], header["p"]), Partition.from_string(header["partition"])


def write_matrix(stream, matrix):
    writer = csv.writer(stream, lineterminator="\n")
    for row in np.asarray(matrix):
        writer.writerow([repr(float(x)) for x in row])


def read_matrix(stream):
    return np.array([[float(x) for x in row] for row in csv.reader(stream) if row])


def law_rows(law):
    return [
        {"mu_s": float(a), "mu_sbar": float(b), "log_weight": float(w), "prob": float(q)}
        for a, b, w, q in law.rows()
    ]


LAW_COLUMNS = ("mu_s", "mu_sbar", "log_weight", "prob")
