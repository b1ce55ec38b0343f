"""Readers and writers for cohort, panel, feature, model, tree and prediction files.

Floats are written with 17 significant digits so every float64 survives a
text round trip unchanged.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .errors import SchemaError
from .genotype import CASE, CONTROL, DEFAULT_DIFF, Cohort, DiffTable, Genotype, ReferencePanel, SampleRecord
from .splitter import Leaf, LeafStatus, Node, SubgroupSummary
from .svm import SvmConfig, SvmModel

MODEL_HEADER = "snpsvm-model v1"
TREE_FORMAT = "snpsvm-tree v1"
LABEL_TOKENS = {"case": CASE, "control": CONTROL, "?": None}


def fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(float(x), ".17g")


def label_token(label) -> str:
    return {CASE: "case", CONTROL: "control", None: "?"}[label]


def _parse_label(token, line):
    try:
        return LABEL_TOKENS[token.strip().lower()]
    except KeyError:
        raise SchemaError(f"unknown label {token!r} (expected case, control or ?)", line) from None


def _parse_float(token, line, what):
    try:
        value = float(token)
    except ValueError:
        raise SchemaError(f"bad {what} {token!r}", line) from None
    return value


def _rows(text):
    """(line number, row) pairs, skipping blank lines."""
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), start=1):
        if row and any(cell.strip() for cell in row):
            yield lineno, [cell.strip() for cell in row]


def _header(rows, expected_prefix, what):
    try:
        lineno, header = next(rows)
    except StopIteration:
        raise SchemaError(f"empty {what} file", 1) from None
    if [h.lower() for h in header[: len(expected_prefix)]] != expected_prefix:
        raise SchemaError(f"{what} header must start with {','.join(expected_prefix)}", lineno)
    return header


# -- cohort -----------------------------------------------------------------

def dumps_cohort(cohort: Cohort) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["sample_id", "label", *cohort.snps])
    for rec in cohort.records:
        writer.writerow([rec.sample_id, label_token(rec.label), *(g.name for g in rec.genotypes)])
    return out.getvalue()


def loads_cohort(text: str) -> Cohort:
    rows = _rows(text)
    header = _header(rows, ["sample_id", "label"], "cohort")
    snps = tuple(header[2:])
    if not snps:
        raise SchemaError("cohort has no SNP columns", 1)
    if len(set(snps)) != len(snps) or not all(snps):
        raise SchemaError("SNP ids in cohort header must be unique and non-empty", 1)
    records, seen = [], set()
    for lineno, row in rows:
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} fields, found {len(row)}", lineno)
        sample_id = row[0]
        if not sample_id or sample_id in seen:
            raise SchemaError(f"missing or duplicate sample_id {sample_id!r}", lineno)
        seen.add(sample_id)
        try:
            genotypes = tuple(Genotype.parse(tok) for tok in row[2:])
        except SchemaError as exc:
            raise SchemaError(str(exc), lineno) from None
        records.append(SampleRecord(sample_id, _parse_label(row[1], lineno), genotypes))
    return Cohort(snps, tuple(records))


# -- reference panel --------------------------------------------------------

def dumps_panel(panel: ReferencePanel) -> str:
    lines = ["snp_id,n_ww,n_wm,n_mm"]
    lines += [f"{snp},{a},{b},{c}" for snp, (a, b, c) in zip(panel.snps, panel.counts.tolist())]
    return "\n".join(lines) + "\n"


def loads_panel(text: str) -> ReferencePanel:
    rows = _rows(text)
    _header(rows, ["snp_id", "n_ww", "n_wm", "n_mm"], "panel")
    snps, counts, total = [], [], None
    for lineno, row in rows:
        if len(row) != 4:
            raise SchemaError(f"expected 4 fields, found {len(row)}", lineno)
        try:
            triple = [int(tok) for tok in row[1:]]
        except ValueError:
            raise SchemaError(f"counts must be integers: {row[1:]}", lineno) from None
        if min(triple) < 0:
            raise SchemaError("negative count", lineno)
        if total is None:
            total = sum(triple)
        elif sum(triple) != total:
            raise SchemaError(f"row sum {sum(triple)} differs from panel total {total}", lineno)
        if row[0] in snps:
            raise SchemaError(f"duplicate SNP id {row[0]!r}", lineno)
        snps.append(row[0])
        counts.append(triple)
    if not snps:
        raise SchemaError("panel has no SNP rows")
    return ReferencePanel(tuple(snps), np.array(counts))


# -- encoded features -------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FeatureTable:
    sample_ids: tuple
    labels: tuple
    names: tuple
    X: np.ndarray

    def labelled(self):
        """Rows with a known label, as (ids, X, y)."""
        keep = [k for k, lab in enumerate(self.labels) if lab is not None]
        y = np.array([self.labels[k] for k in keep], dtype=np.float64)
        return tuple(self.sample_ids[k] for k in keep), self.X[keep], y

    def same_as(self, other) -> bool:
        return (self.sample_ids == other.sample_ids and self.labels == other.labels
                and self.names == other.names and np.array_equal(self.X, other.X))


def dumps_features(table: FeatureTable) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["sample_id", "label", *table.names])
    for sid, lab, row in zip(table.sample_ids, table.labels, table.X):
        writer.writerow([sid, label_token(lab), *(fmt(v) for v in row)])
    return out.getvalue()


def loads_features(text: str) -> FeatureTable:
    rows = _rows(text)
    header = _header(rows, ["sample_id", "label"], "feature")
    names = tuple(header[2:])
    if not names:
        raise SchemaError("feature file has no feature columns", 1)
    if len(set(names)) != len(names):
        raise SchemaError("duplicate feature column", 1)
    ids, labels, values, seen = [], [], [], set()
    for lineno, row in rows:
        if len(row) != len(header):
            raise SchemaError(f"expected {len(header)} fields, found {len(row)}", lineno)
        if not row[0] or row[0] in seen:
            raise SchemaError(f"missing or duplicate sample_id {row[0]!r}", lineno)
        seen.add(row[0])
        ids.append(row[0])
        labels.append(_parse_label(row[1], lineno))
        vals = [_parse_float(tok, lineno, "feature value") for tok in row[2:]]
        if not all(math.isfinite(v) for v in vals):
            raise SchemaError("non-finite feature value", lineno)
        values.append(vals)
    X = np.array(values, dtype=np.float64).reshape(len(values), len(names))
    return FeatureTable(tuple(ids), tuple(labels), names, X)


# -- trained model ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ModelDocument:
    """A trained model plus what is needed to apply it to new genotype data."""

    snps: tuple
    model: SvmModel
    sample_ids: tuple
    diff_table: DiffTable = DEFAULT_DIFF

    def same_as(self, other) -> bool:
        return (self.snps == other.snps and self.sample_ids == other.sample_ids
                and self.diff_table == other.diff_table and self.model.same_as(other.model))


def dumps_model(doc: ModelDocument) -> str:
    m, cfg, t = doc.model, doc.model.config, doc.diff_table
    lines = [
        MODEL_HEADER,
        f"n\t{m.dimension}",
        "snps\t" + "\t".join(doc.snps),
        "w\t" + "\t".join(fmt(v) for v in m.w),
        f"b\t{fmt(m.b)}",
        f"C\t{fmt(cfg.C)}",
        f"tol\t{fmt(cfg.kkt_tolerance)}",
        f"max_passes\t{cfg.max_passes if cfg.max_passes is not None else '-'}",
        f"seed\t{cfg.seed}",
        f"diff\t{fmt(t.ww_wm)}\t{fmt(t.wm_mm)}\t{fmt(t.ww_mm)}",
        f"alphas\t{len(m.alphas)}",
    ]
    lines += [f"{sid}\t{fmt(a)}" for sid, a in zip(doc.sample_ids, m.alphas)]
    return "\n".join(lines) + "\n"


def loads_model(text: str) -> ModelDocument:
    lines = text.splitlines()
    if not lines or lines[0].strip() != MODEL_HEADER:
        raise SchemaError(f"model file must start with {MODEL_HEADER!r}", 1)

    def field_at(k, key):
        if k >= len(lines):
            raise SchemaError(f"truncated model file, expected {key!r}", k + 1)
        parts = lines[k].split("\t")
        if parts[0] != key:
            raise SchemaError(f"expected {key!r} line, found {parts[0]!r}", k + 1)
        return parts[1:]

    n = int(field_at(1, "n")[0])
    snps = tuple(field_at(2, "snps"))
    w = np.array([_parse_float(v, 4, "weight") for v in field_at(3, "w")])
    if len(snps) != n or len(w) != n:
        raise SchemaError(f"dimension {n} disagrees with snps/w lengths", 2)
    b = _parse_float(field_at(4, "b")[0], 5, "offset")
    C = _parse_float(field_at(5, "C")[0], 6, "C")
    tol = _parse_float(field_at(6, "tol")[0], 7, "tolerance")
    passes = field_at(7, "max_passes")[0]
    seed = int(field_at(8, "seed")[0])
    diff = [_parse_float(v, 10, "diff score") for v in field_at(9, "diff")]
    count = int(field_at(10, "alphas")[0])
    body = lines[11:11 + count]
    if len(body) != count:
        raise SchemaError(f"expected {count} alpha lines, found {len(body)}", 12)
    sample_ids, alphas = [], []
    for k, line in enumerate(body, start=12):
        sid, _, value = line.rpartition("\t")
        sample_ids.append(sid)
        alphas.append(_parse_float(value, k, "alpha"))
    config = SvmConfig(C=C, kkt_tolerance=tol, max_passes=None if passes == "-" else int(passes), seed=seed)
    model = SvmModel(w=w, b=b, alphas=np.array(alphas, dtype=np.float64), config=config)
    return ModelDocument(snps, model, tuple(sample_ids), DiffTable(*diff))


# -- split tree -------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class TreeDocument:
    snps: tuple
    tree: object
    sample_ids: tuple
    diff_table: DiffTable = DEFAULT_DIFF


def _model_dict(model: SvmModel) -> dict:
    cfg = model.config
    return {
        "w": model.w.tolist(),
        "b": model.b,
        "alphas": model.alphas.tolist(),
        "C": fmt(cfg.C) if math.isinf(cfg.C) else cfg.C,
        "kkt_tolerance": cfg.kkt_tolerance,
        "max_passes": cfg.max_passes,
        "seed": cfg.seed,
    }


def _model_from(d: dict) -> SvmModel:
    C = float(d["C"])
    config = SvmConfig(C=C, kkt_tolerance=d["kkt_tolerance"], max_passes=d["max_passes"], seed=d["seed"])
    return SvmModel(np.array(d["w"], dtype=np.float64), float(d["b"]),
                    np.array(d["alphas"], dtype=np.float64), config)


def tree_to_dict(tree, sample_ids=None) -> dict:
    if isinstance(tree, Node):
        return {"type": "node", "model": _model_dict(tree.model),
                "left": tree_to_dict(tree.left, sample_ids),
                "right": tree_to_dict(tree.right, sample_ids)}
    s = tree.summary
    out = {
        "type": "leaf",
        "status": tree.status.value,
        "majority_label": tree.majority_label,
        "purity": tree.purity,
        "size": len(tree.indices),
        "center": s.center.tolist(),
        "stdevs": s.stdevs.tolist(),
        "radius": s.radius,
        "max_member_distance": s.max_member_distance,
        "indices": list(tree.indices),
    }
    if sample_ids is not None:
        out["members"] = [sample_ids[i] for i in tree.indices]
    return out


def tree_from_dict(d: dict):
    if d["type"] == "node":
        return Node(_model_from(d["model"]), tree_from_dict(d["left"]), tree_from_dict(d["right"]))
    if d["type"] != "leaf":
        raise SchemaError(f"unknown tree node type {d['type']!r}")
    summary = SubgroupSummary(np.array(d["center"], dtype=np.float64), np.array(d["stdevs"], dtype=np.float64),
                              float(d["radius"]), float(d["max_member_distance"]))
    return Leaf(tuple(d["indices"]), int(d["majority_label"]), float(d["purity"]),
                LeafStatus(d["status"]), summary)


def dumps_tree(doc: TreeDocument) -> str:
    t = doc.diff_table
    payload = {
        "format": TREE_FORMAT,
        "snps": list(doc.snps),
        "sample_ids": list(doc.sample_ids),
        "diff": [t.ww_wm, t.wm_mm, t.ww_mm],
        "tree": tree_to_dict(doc.tree, doc.sample_ids),
    }
    return json.dumps(payload, indent=1) + "\n"


def loads_tree(text: str) -> TreeDocument:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid tree JSON: {exc.msg}", exc.lineno) from None
    if not isinstance(payload, dict) or payload.get("format") != TREE_FORMAT:
        raise SchemaError(f"not a {TREE_FORMAT} document", 1)
    try:
        return TreeDocument(tuple(payload["snps"]), tree_from_dict(payload["tree"]),
                            tuple(payload["sample_ids"]), DiffTable(*payload["diff"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed tree document: {exc}") from None


def trees_equal(a, b) -> bool:
    return tree_to_dict(a) == tree_to_dict(b)


# -- predictions ------------------------------------------------------------

def dumps_predictions(sample_ids, labels, scores, distances: Optional[list] = None) -> str:
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    header = ["sample_id", "predicted", "score"] + (["distance"] if distances is not None else [])
    writer.writerow(header)
    for k, (sid, lab, score) in enumerate(zip(sample_ids, labels, scores)):
        row = [sid, label_token(lab), fmt(score)]
        if distances is not None:
            row.append(fmt(distances[k]))
        writer.writerow(row)
    return out.getvalue()


def loads_predictions(text: str) -> list:
    rows = _rows(text)
    header = _header(rows, ["sample_id", "predicted", "score"], "predictions")
    out = []
    for lineno, row in rows:
        entry = {"sample_id": row[0], "predicted": _parse_label(row[1], lineno),
                 "score": _parse_float(row[2], lineno, "score")}
        if len(header) > 3:
            entry["distance"] = _parse_float(row[3], lineno, "distance")
        out.append(entry)
    return out


def read_text(path) -> str:
    return Path(path).read_text(encoding="utf-8")


def write_text(path, text: str) -> None:
    Path(path).write_text(text, encoding="utf-8")
