"""Genotype types, difference scoring and reference-panel encoding.

A sample's genotype at each SNP is compared against every member of a
healthy reference panel; the per-SNP mean difference score becomes one
coordinate of the sample's feature vector.  Panels are stored as genotype
counts, so the mean is a count-weighted average of table entries.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import SchemaError, UsageError

CASE = 1
CONTROL = -1


class Genotype(enum.IntEnum):
    """Unordered diploid genotype at one SNP: wild/wild, wild/mutant, mutant/mutant."""

    WW = 0
    WM = 1
    MM = 2

    @classmethod
    def parse(cls, token: str) -> "Genotype":
        key = token.strip().upper()
        if key == "MW":
            key = "WM"
        try:
            return cls[key]
        except KeyError:
            raise SchemaError(f"unrecognised genotype token {token!r}") from None


@dataclass(frozen=True)
class DiffTable:
    """Symmetric genotype difference scores with a zero diagonal.

    Only the three off-diagonal values are free; the defaults are 0.25 for
    WW/WM, 0.75 for WM/MM and 1 for WW/MM.
    """

    ww_wm: float = 0.25
    wm_mm: float = 0.75
    ww_mm: float = 1.0

    def __post_init__(self):
        for name in ("ww_wm", "wm_mm", "ww_mm"):
            value = float(getattr(self, name))
            if not 0.0 <= value <= 1.0:
                raise UsageError(f"diff score {name}={value} outside [0, 1]")
            object.__setattr__(self, name, value)

    def matrix(self) -> np.ndarray:
        """3x3 score matrix indexed by ``Genotype`` values."""
        a, b, c = self.ww_wm, self.wm_mm, self.ww_mm
        return np.array([[0.0, a, c], [a, 0.0, b], [c, b, 0.0]])


DEFAULT_DIFF = DiffTable()


def diff(a: Genotype, b: Genotype, table: DiffTable = DEFAULT_DIFF) -> float:
    if a == b:
        return 0.0
    pair = {Genotype(a), Genotype(b)}
    if pair == {Genotype.WW, Genotype.WM}:
        return table.ww_wm
    if pair == {Genotype.WM, Genotype.MM}:
        return table.wm_mm
    return table.ww_mm


@dataclass(frozen=True)
class SampleRecord:
    sample_id: str
    label: Optional[int]
    genotypes: tuple

    def __post_init__(self):
        if self.label not in (CASE, CONTROL, None):
            raise UsageError(f"label must be +1, -1 or None, got {self.label!r}")
        object.__setattr__(self, "genotypes", tuple(Genotype(g) for g in self.genotypes))


@dataclass(frozen=True)
class Cohort:
    """Ordered SNP ids plus the records genotyped at them, in that order."""

    snps: tuple
    records: tuple

    def __post_init__(self):
        snps = tuple(str(s) for s in self.snps)
        records = tuple(self.records)
        _check_snp_ids(snps)
        seen = set()
        for rec in records:
            if rec.sample_id in seen:
                raise SchemaError(f"duplicate sample_id {rec.sample_id!r}")
            seen.add(rec.sample_id)
            if len(rec.genotypes) != len(snps):
                raise SchemaError(
                    f"sample {rec.sample_id!r} has {len(rec.genotypes)} genotypes, "
                    f"expected {len(snps)}"
                )
        object.__setattr__(self, "snps", snps)
        object.__setattr__(self, "records", records)

    @property
    def sample_ids(self) -> list:
        return [r.sample_id for r in self.records]

    @property
    def labels(self) -> list:
        return [r.label for r in self.records]

    def genotype_matrix(self) -> np.ndarray:
        return np.array([r.genotypes for r in self.records], dtype=np.int64).reshape(
            len(self.records), len(self.snps)
        )

    def reorder(self, snps: Sequence[str]) -> "Cohort":
        """Return the cohort with columns permuted to ``snps``.

        Raises SchemaError naming the first SNP of ``snps`` the cohort lacks,
        or the first cohort SNP that ``snps`` does not mention.
        """
        snps = tuple(snps)
        if snps == self.snps:
            return self
        position = {s: i for i, s in enumerate(self.snps)}
        for s in snps:
            if s not in position:
                raise SchemaError(f"SNP {s!r} missing from cohort")
        wanted = set(snps)
        for s in self.snps:
            if s not in wanted:
                raise SchemaError(f"SNP {s!r} not present in reference panel")
        order = [position[s] for s in snps]
        records = tuple(
            SampleRecord(r.sample_id, r.label, tuple(r.genotypes[k] for k in order))
            for r in self.records
        )
        return Cohort(snps, records)


@dataclass(frozen=True)
class ReferencePanel:
    """Per-SNP genotype counts (n_WW, n_WM, n_MM) over a healthy baseline population."""

    snps: tuple
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        snps = tuple(str(s) for s in self.snps)
        _check_snp_ids(snps)
        counts = np.array(self.counts, dtype=np.int64).reshape(-1, 3)
        if counts.shape[0] != len(snps):
            raise SchemaError(f"{counts.shape[0]} count rows for {len(snps)} SNPs")
        if (counts < 0).any():
            raise SchemaError("negative genotype count")
        totals = counts.sum(axis=1)
        if len(snps) and (totals != totals[0]).any():
            bad = snps[int(np.argmax(totals != totals[0]))]
            raise SchemaError(f"SNP {bad!r} count total differs from panel total {totals[0]}")
        if len(snps) and totals[0] < 1:
            raise SchemaError("panel total must be at least 1")
        counts.setflags(write=False)
        object.__setattr__(self, "snps", snps)
        object.__setattr__(self, "counts", counts)

    @property
    def total(self) -> int:
        return int(self.counts[0].sum()) if len(self.snps) else 0

    def __eq__(self, other):
        if not isinstance(other, ReferencePanel):
            return NotImplemented
        return self.snps == other.snps and np.array_equal(self.counts, other.counts)

    def __hash__(self):
        return hash((self.snps, self.counts.tobytes()))

    def score_matrix(self, table: DiffTable = DEFAULT_DIFF) -> np.ndarray:
        """(n_snps, 3) table: entry [j, g] is the mean diff of genotype g against SNP j's panel."""
        d = table.matrix()
        c = self.counts.astype(np.float64)
        # same summation order as encode_feature, so both agree bit-for-bit
        return (c[:, 0:1] * d[0] + c[:, 1:2] * d[1] + c[:, 2:3] * d[2]) / self.total


def _check_snp_ids(snps):
    seen = set()
    for s in snps:
        if not s:
            raise SchemaError("empty SNP id")
        if s in seen:
            raise SchemaError(f"duplicate SNP id {s!r}")
        seen.add(s)


def encode_feature(g: Genotype, snp_index: int, panel: ReferencePanel,
                   table: DiffTable = DEFAULT_DIFF) -> float:
    if not 0 <= snp_index < len(panel.snps):
        raise UsageError(f"SNP index {snp_index} out of range for {len(panel.snps)} SNPs")
    n_ww, n_wm, n_mm = (int(c) for c in panel.counts[snp_index])
    g = Genotype(g)
    return (n_ww * diff(g, Genotype.WW, table) + n_wm * diff(g, Genotype.WM, table)
            + n_mm * diff(g, Genotype.MM, table)) / panel.total


def encode_sample(sample: SampleRecord, panel: ReferencePanel, table: DiffTable = DEFAULT_DIFF,
                  snps: Optional[Sequence[str]] = None) -> np.ndarray:
    """Feature vector of one sample; ``snps`` (the sample's SNP order) is checked against the panel."""
    if snps is not None:
        snps = tuple(snps)
        for mine, theirs in zip(snps, panel.snps):
            if mine != theirs:
                raise SchemaError(f"SNP {mine!r} does not match panel SNP {theirs!r}")
        if len(snps) != len(panel.snps):
            extra = (snps + panel.snps)[min(len(snps), len(panel.snps))]
            raise SchemaError(f"SNP {extra!r} unmatched between sample and panel")
    if len(sample.genotypes) != len(panel.snps):
        raise SchemaError(
            f"sample {sample.sample_id!r} has {len(sample.genotypes)} genotypes, "
            f"panel has {len(panel.snps)} SNPs"
        )
    scores = panel.score_matrix(table)
    idx = np.fromiter((int(g) for g in sample.genotypes), dtype=np.int64, count=len(sample.genotypes))
    return scores[np.arange(len(idx)), idx]


def encode_cohort(cohort: Cohort, panel: ReferencePanel, table: DiffTable = DEFAULT_DIFF) -> np.ndarray:
    """Encode every record; columns follow the panel's SNP order."""
    cohort = cohort.reorder(panel.snps)
    geno = cohort.genotype_matrix()
    scores = panel.score_matrix(table)
    return scores[np.arange(len(panel.snps))[None, :], geno]


def build_panel(records: Sequence[SampleRecord], snps: Sequence[str]) -> ReferencePanel:
    """Tally genotype counts from raw panel records."""
    if not records:
        raise UsageError("cannot build a panel from zero records")
    cohort = Cohort(tuple(snps), tuple(records))
    geno = cohort.genotype_matrix()
    counts = np.stack([(geno == g).sum(axis=0) for g in Genotype], axis=1)
    return ReferencePanel(cohort.snps, counts)
