"""
Encoding genotypes against a reference panel
============================================

Each SNP coordinate is the mean difference score between the sample's
genotype and every genotype in a healthy reference panel.
"""
from snpsvm import (Cohort, DiffTable, Genotype, SampleRecord, build_panel, diff, encode_cohort,
                    encode_feature)

WW, WM, MM = Genotype.WW, Genotype.WM, Genotype.MM

# default difference table
for a in Genotype:
    print(a.name, [diff(a, b) for b in Genotype])

# %%
# A four-person panel genotyped at two SNPs.
snps = ["rs100", "rs200"]
panel = build_panel([
    SampleRecord("ref1", None, (WW, WW)),
    SampleRecord("ref2", None, (WW, WM)),
    SampleRecord("ref3", None, (WM, WM)),
    SampleRecord("ref4", None, (WW, MM)),
], snps)
print(panel.counts, "total", panel.total)

# MM at rs100: three WW members differ by 1, one WM member by 0.75
print(encode_feature(MM, 0, panel))

# %%
# Encoding a whole cohort.  The scores are configuration, so a softer
# table changes every coordinate.
cohort = Cohort(tuple(snps), (
    SampleRecord("alice", 1, (MM, WM)),
    SampleRecord("bob", -1, (WW, WW)),
))
print(encode_cohort(cohort, panel))
print(encode_cohort(cohort, panel, DiffTable(ww_wm=0.5, wm_mm=0.5, ww_mm=1.0)))
