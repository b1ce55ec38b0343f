"""Case-control association testing for multi-SNP genotypes with a linear SVM."""
from .errors import DegenerateModelError, SchemaError, SnpSvmError, UsageError
from .genotype import (CASE, CONTROL, DEFAULT_DIFF, Cohort, DiffTable, Genotype, ReferencePanel,
                       SampleRecord, build_panel, diff, encode_cohort, encode_feature, encode_sample)
from .splitter import (Leaf, LeafStatus, Node, SplitConfig, SubgroupSummary, classify_by_tree,
                       purity, split_recursive, summarize)
from .svm import (Classification, LabeledVector, SolveDiagnostics, SvmConfig, SvmModel, classify,
                  decision_value, decision_values, dual_objective, geometric_margin, kkt_violation,
                  normalized_hyperplane, stack, train)
from .synth import SynthConfig, generate_cohort, split_cohort

__version__ = "0.1.0"

__all__ = [
    "CASE",
    "CONTROL",
    "Classification",
    "Cohort",
    "DEFAULT_DIFF",
    "DegenerateModelError",
    "DiffTable",
    "Genotype",
    "LabeledVector",
    "Leaf",
    "LeafStatus",
    "Node",
    "ReferencePanel",
    "SampleRecord",
    "SchemaError",
    "SnpSvmError",
    "SolveDiagnostics",
    "SplitConfig",
    "SubgroupSummary",
    "SvmConfig",
    "SvmModel",
    "SynthConfig",
    "UsageError",
    "build_panel",
    "classify",
    "classify_by_tree",
    "decision_value",
    "decision_values",
    "diff",
    "dual_objective",
    "encode_cohort",
    "encode_feature",
    "encode_sample",
    "generate_cohort",
    "geometric_margin",
    "kkt_violation",
    "normalized_hyperplane",
    "purity",
    "split_cohort",
    "split_recursive",
    "stack",
    "summarize",
    "train",
]
