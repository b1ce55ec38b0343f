"""Synthetic case-control cohorts with planted causal SNPs.

Genotypes follow Hardy-Weinberg proportions from a mutant allele frequency.
Controls and panel members use ``base_maf`` everywhere.  At causal SNPs a
case's MM probability is raised by ``effect`` (capped at 1), with the WW and
WM probabilities shrunk proportionally.  All draws come from numpy's PCG64
generator seeded with ``seed``, in a fixed order: causal SNP choice, panel,
controls, cases.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .genotype import CASE, CONTROL, Cohort, SampleRecord, build_panel


@dataclass(frozen=True)
class SynthConfig:
    n_snps: int = 10
    n_causal: int = 2
    n_cases: int = 200
    n_controls: int = 200
    n_panel: int = 500
    effect: float = 0.6
    base_maf: float = 0.1
    seed: int = 20240501

    def __post_init__(self):
        for name in ("n_snps", "n_cases", "n_controls", "n_panel"):
            if int(getattr(self, name)) < 1:
                raise UsageError(f"{name} must be a positive integer")
        if not 0 <= self.n_causal <= self.n_snps:
            raise UsageError(f"n_causal must lie in [0, {self.n_snps}]")
        if not 0.0 <= self.effect <= 1.0:
            raise UsageError("effect must lie in [0, 1]")
        if not 0.0 < self.base_maf <= 0.5:
            raise UsageError("base_maf must lie in (0, 0.5]")


def hardy_weinberg(maf: float) -> np.ndarray:
    return np.array([(1 - maf) ** 2, 2 * maf * (1 - maf), maf ** 2])


def case_genotype_probs(maf: float, effect: float) -> np.ndarray:
    base = hardy_weinberg(maf)
    mm = min(1.0, base[2] + effect)
    rest = base[:2].sum()
    head = base[:2] * ((1.0 - mm) / rest) if rest > 0 else np.zeros(2)
    return np.array([head[0], head[1], mm])


def _draw(rng, n_rows, probs):
    """Genotype matrix; ``probs`` is (n_snps, 3), one categorical per column."""
    u = rng.random((n_rows, len(probs)))
    cdf = np.cumsum(probs, axis=1)
    return (u[:, :, None] >= cdf[None, :, :2]).sum(axis=2)


def snp_ids(n: int) -> tuple:
    width = len(str(n))
    return tuple(f"snp{k + 1:0{width}d}" for k in range(n))


def generate_cohort(config: SynthConfig = SynthConfig()) -> tuple:
    """Returns ``(labelled Cohort, ReferencePanel, frozenset of causal SNP ids)``."""
    rng = np.random.Generator(np.random.PCG64(config.seed))
    snps = snp_ids(config.n_snps)
    causal = np.sort(rng.choice(config.n_snps, size=config.n_causal, replace=False))
    base = np.tile(hardy_weinberg(config.base_maf), (config.n_snps, 1))
    shifted = base.copy()
    shifted[causal] = case_genotype_probs(config.base_maf, config.effect)

    panel_geno = _draw(rng, config.n_panel, base)
    control_geno = _draw(rng, config.n_controls, base)
    case_geno = _draw(rng, config.n_cases, shifted)

    panel = build_panel(
        [SampleRecord(f"ref{k + 1}", None, tuple(row)) for k, row in enumerate(panel_geno)], snps
    )
    records = [SampleRecord(f"ctrl{k + 1}", CONTROL, tuple(row)) for k, row in enumerate(control_geno)]
    records += [SampleRecord(f"case{k + 1}", CASE, tuple(row)) for k, row in enumerate(case_geno)]
    truth = frozenset(snps[k] for k in causal)
    return Cohort(snps, tuple(records)), panel, truth


def split_cohort(cohort: Cohort, test_fraction: float = 0.5, seed: int = 0) -> tuple:
    """Stratified train/test split; each class is shuffled and cut separately."""
    if not 0.0 < test_fraction < 1.0:
        raise UsageError("test_fraction must lie in (0, 1)")
    rng = np.random.Generator(np.random.PCG64(seed))
    train, test = [], []
    for label in (CONTROL, CASE):
        members = [r for r in cohort.records if r.label == label]
        order = rng.permutation(len(members))
        cut = int(round(len(members) * test_fraction))
        test += [members[k] for k in sorted(order[:cut])]
        train += [members[k] for k in sorted(order[cut:])]
    return Cohort(cohort.snps, tuple(train)), Cohort(cohort.snps, tuple(test))
