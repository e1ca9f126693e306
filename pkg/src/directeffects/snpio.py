"""Genotype ingestion, dominant/recessive binary coding and the dataset
text format.

File layout (tab-separated)::

    #kind=<genotype|binary> n=<n> p=<p>
    <label 1> ... <label p>
    #response                # optional, followed by n lines of 0/1
    0
    1
    ...
    <n data rows of p symbols>

Genotype files use 0/1/2 and ``NA`` for a missing call; binary files use
0/1 only.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, ParseError
from .simgen import BinaryMatrix

__all__ = [
    "GenotypeMatrix",
    "EncodedDataset",
    "encode",
    "prevalence_filter",
    "read_dataset",
    "write_dataset",
    "write_provenance",
]

MISSING = -1
MISSING_TOKENS = ("NA", ".")
MAX_MISSING_FRACTION = 0.10
_HEADER = re.compile(r"^#kind=(\w+)\s+n=(\d+)\s+p=(\d+)\s*$")


@dataclass(frozen=True, eq=False)
class GenotypeMatrix:
    """n x s minor-allele counts; ``MISSING`` (-1) marks an absent call."""

    values: np.ndarray
    names: list

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.ndim != 2:
            raise DataError("genotype matrix must be 2-d")
        bad = ~np.isin(v, (MISSING, 0, 1, 2))
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ParseError(f"invalid genotype {v[i, j]!r}", line=int(i) + 1, column=int(j) + 1)
        v = v.astype(np.int8)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        names = [str(s) for s in self.names]
        if len(names) != v.shape[1] or len(set(names)) != len(names):
            raise DataError("SNP names must be unique, one per column")
        object.__setattr__(self, "names", names)

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def s(self):
        return self.values.shape[1]

    def __eq__(self, other):
        if not isinstance(other, GenotypeMatrix):
            return NotImplemented
        return self.names == other.names and np.array_equal(self.values, other.values)


@dataclass
class EncodedDataset:
    """Binary design with a map from each column label to (snp, kind)."""

    matrix: BinaryMatrix
    provenance: dict
    imputed: dict = field(default_factory=dict)

    @property
    def labels(self):
        return self.matrix.labels


def _impute_modal(col, name):
    miss = col == MISSING
    if not miss.any():
        return col, 0
    frac = miss.mean()
    if frac > MAX_MISSING_FRACTION:
        raise DataError(f"SNP {name}: {frac:.1%} missing calls exceeds the {MAX_MISSING_FRACTION:.0%} cap")
    observed = col[~miss]
    if observed.size == 0:
        raise DataError(f"SNP {name} has no observed genotypes")
    mode = int(np.bincount(observed, minlength=3).argmax())
    out = col.copy()
    out[miss] = mode
    return out, int(miss.sum())


def encode(g: GenotypeMatrix) -> EncodedDataset:
    """Two binary columns per SNP: ``<snp>D`` = genotype >= 1 and
    ``<snp>R`` = genotype == 2. Missing calls take the SNP's modal genotype."""
    cols, labels, prov, imputed = [], [], {}, {}
    for j, name in enumerate(g.names):
        col, k = _impute_modal(g.values[:, j], name)
        if k:
            imputed[name] = k
        for suffix, kind, bits in (("D", "dominant", col >= 1), ("R", "recessive", col == 2)):
            label = f"{name}{suffix}"
            cols.append(bits.astype(np.uint8))
            labels.append(label)
            prov[label] = (name, kind)
    values = np.column_stack(cols) if cols else np.zeros((g.n, 0), dtype=np.uint8)
    return EncodedDataset(BinaryMatrix(values, labels), prov, imputed)


def prevalence_filter(d: EncodedDataset, min_prev=0.05) -> EncodedDataset:
    """Keep columns whose rarer value has frequency >= ``min_prev``."""
    v = d.matrix.values
    m = v.mean(axis=0) if v.shape[0] else np.zeros(v.shape[1])
    keep = np.flatnonzero(np.minimum(m, 1 - m) >= min_prev)
    matrix = d.matrix.columns(keep)
    prov = {lab: d.provenance[lab] for lab in matrix.labels}
    return EncodedDataset(matrix, prov, dict(d.imputed))


def write_dataset(path, data, y=None):
    """Write a BinaryMatrix, EncodedDataset or GenotypeMatrix (plus an
    optional bundled response) in the text format above."""
    if isinstance(data, EncodedDataset):
        data = data.matrix
    if isinstance(data, GenotypeMatrix):
        kind, labels = "genotype", data.names
        rows = [["NA" if x == MISSING else str(int(x)) for x in r] for r in data.values]
    elif isinstance(data, BinaryMatrix):
        kind, labels = "binary", data.labels
        rows = [[str(int(x)) for x in r] for r in data.values]
    else:
        raise TypeError(f"cannot write {type(data).__name__}")
    n, p = len(rows), len(labels)
    lines = [f"#kind={kind} n={n} p={p}", "\t".join(labels)]
    if y is not None:
        y = np.asarray(y)
        if y.shape != (n,) or not np.isin(y, (0, 1)).all():
            raise DataError("bundled response must be n values of 0/1")
        lines.append("#response")
        lines.extend(str(int(v)) for v in y)
    lines.extend("\t".join(r) for r in rows)
    Path(path).write_text("\n".join(lines) + "\n")


def _symbol(tok, kind, line, col):
    if kind == "genotype":
        if tok in MISSING_TOKENS:
            return MISSING
        if tok in ("0", "1", "2"):
            return int(tok)
    elif tok in ("0", "1"):
        return int(tok)
    raise ParseError(f"invalid {kind} symbol {tok!r}", line=line, column=col)


def read_dataset(path):
    """Parse a dataset file.

    Returns ``(data, y)`` where ``data`` is a GenotypeMatrix for
    ``kind=genotype`` files and an EncodedDataset (identity provenance) for
    ``kind=binary`` files; ``y`` is None unless a response is bundled.
    """
    text = Path(path).read_text().splitlines()
    if not text:
        raise ParseError("empty file", line=1)
    m = _HEADER.match(text[0].strip())
    if not m:
        raise ParseError("header must read '#kind=<genotype|binary> n=<n> p=<p>'", line=1)
    kind, n, p = m.group(1), int(m.group(2)), int(m.group(3))
    if kind not in ("genotype", "binary"):
        raise ParseError(f"unknown kind {kind!r}", line=1)
    if len(text) < 2:
        raise ParseError("missing label row", line=2)
    labels = text[1].split("\t") if p else []
    if len(labels) != p:
        raise ParseError(f"expected {p} labels, found {len(labels)}", line=2)
    pos = 2
    y = None
    if pos < len(text) and text[pos].strip() == "#response":
        pos += 1
        if pos + n > len(text):
            raise ParseError("response block shorter than n", line=len(text))
        vals = []
        for i in range(n):
            tok = text[pos + i].strip()
            if tok not in ("0", "1"):
                raise ParseError(f"response value {tok!r} is not 0/1", line=pos + i + 1)
            vals.append(int(tok))
        y = np.array(vals, dtype=np.uint8)
        pos += n
    body = [ln for ln in text[pos:]]
    while body and not body[-1].strip():
        body.pop()
    if len(body) != n:
        raise ParseError(f"expected {n} data rows, found {len(body)}", line=pos + len(body))
    values = np.empty((n, p), dtype=np.int8)
    for i, ln in enumerate(body):
        toks = ln.split("\t") if p else []
        lineno = pos + i + 1
        if len(toks) != p:
            raise ParseError(f"row has {len(toks)} fields, expected {p}", line=lineno)
        for j, tok in enumerate(toks):
            values[i, j] = _symbol(tok.strip(), kind, lineno, j + 1)
    if kind == "genotype":
        return GenotypeMatrix(values, labels), y
    matrix = BinaryMatrix(values.astype(np.uint8), labels)
    return EncodedDataset(matrix, {lab: (lab, "binary") for lab in labels}), y


def write_provenance(path, d: EncodedDataset):
    """CSV with columns label, snp, kind."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["label", "snp", "kind"])
        for lab in d.labels:
            snp, kind = d.provenance[lab]
            w.writerow([lab, snp, kind])
