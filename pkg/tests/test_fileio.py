import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from datasets import random_dataset
from snpsvm import fileio
from snpsvm.errors import SchemaError
from snpsvm.genotype import Cohort, DiffTable, Genotype, ReferencePanel, SampleRecord
from snpsvm.splitter import SplitConfig, split_recursive
from snpsvm.svm import SvmConfig, SvmModel, train

ids = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789_-.", min_size=1, max_size=8)
finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@st.composite
def cohorts(draw):
    snps = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
    sample_ids = draw(st.lists(ids.filter(lambda s: s != "sample_id"), max_size=6, unique=True))
    records = [SampleRecord(sid, draw(st.sampled_from([1, -1, None])),
                            tuple(draw(st.lists(st.sampled_from(list(Genotype)), min_size=len(snps),
                                                max_size=len(snps)))))
               for sid in sample_ids]
    return Cohort(tuple(snps), tuple(records))


@st.composite
def panels(draw):
    snps = draw(st.lists(ids, min_size=1, max_size=5, unique=True))
    total = draw(st.integers(1, 10_000))
    counts = []
    for _ in snps:
        a = draw(st.integers(0, total))
        b = draw(st.integers(0, total - a))
        counts.append((a, b, total - a - b))
    return ReferencePanel(tuple(snps), np.array(counts))


@settings(max_examples=60)
@given(cohorts())
def test_cohort_round_trip(cohort):
    assert fileio.loads_cohort(fileio.dumps_cohort(cohort)) == cohort


@settings(max_examples=60)
@given(panels())
def test_panel_round_trip(panel):
    assert fileio.loads_panel(fileio.dumps_panel(panel)) == panel


@settings(max_examples=60)
@given(st.data())
def test_model_round_trip(data):
    n = data.draw(st.integers(1, 4))
    l = data.draw(st.integers(2, 6))
    model = SvmModel(
        np.array(data.draw(st.lists(finite, min_size=n, max_size=n))),
        data.draw(finite),
        np.array(data.draw(st.lists(st.floats(0, 1e12), min_size=l, max_size=l))),
        SvmConfig(C=data.draw(st.sampled_from([0.5, 1.0, math.inf, 1e-3])),
                  kkt_tolerance=data.draw(st.floats(1e-12, 1e-2)),
                  max_passes=data.draw(st.sampled_from([None, 7])), seed=data.draw(st.integers(0, 2**31))),
    )
    doc = fileio.ModelDocument(tuple(f"snp{k}" for k in range(n)), model,
                               tuple(data.draw(st.lists(ids, min_size=l, max_size=l, unique=True))),
                               DiffTable(*data.draw(st.lists(st.floats(0, 1), min_size=3, max_size=3))))
    text = fileio.dumps_model(doc)
    assert text.startswith("snpsvm-model v1\n")
    assert fileio.loads_model(text).same_as(doc)


def test_tree_round_trip(rng):
    for _ in range(20):
        X, y = random_dataset(rng, l_min=8, l_max=30, n_max=3)
        tree = split_recursive(X, y, SplitConfig(min_group_size=2, svm=SvmConfig(C=float(rng.choice([0.5, 10])))))
        names = tuple(f"f{k}" for k in range(X.shape[1]))
        sample_ids = tuple(f"s{k}" for k in range(len(X)))
        doc = fileio.TreeDocument(names, tree, sample_ids, DiffTable(0.2, 0.7, 0.9))
        back = fileio.loads_tree(fileio.dumps_tree(doc))
        assert fileio.trees_equal(back.tree, tree)
        assert back.snps == names and back.sample_ids == sample_ids and back.diff_table == doc.diff_table


def test_hard_margin_tree_serialises_inf(two_points):
    X, y = two_points
    tree = split_recursive(X, y, SplitConfig(min_group_size=2, svm=SvmConfig(C=math.inf)))
    back = fileio.loads_tree(fileio.dumps_tree(fileio.TreeDocument(("a", "b"), tree, ("p", "q"))))
    assert back.tree.model.config.C == math.inf
    assert fileio.trees_equal(back.tree, tree)


@settings(max_examples=40)
@given(st.data())
def test_feature_round_trip(data):
    n = data.draw(st.integers(1, 4))
    rows = data.draw(st.integers(0, 5))
    X = np.array(data.draw(st.lists(st.lists(finite, min_size=n, max_size=n), min_size=rows, max_size=rows)),
                 dtype=float).reshape(rows, n)
    table = fileio.FeatureTable(tuple(f"s{k}" for k in range(rows)),
                                tuple(data.draw(st.sampled_from([1, -1, None])) for _ in range(rows)),
                                tuple(f"f{k}" for k in range(n)), X)
    assert fileio.loads_features(fileio.dumps_features(table)).same_as(table)


def test_trained_model_round_trip_bit_exact(rng):
    X, y = random_dataset(rng, l_max=10)
    model, _ = train(X, y, SvmConfig(C=0.7))
    doc = fileio.ModelDocument(tuple(f"f{k}" for k in range(X.shape[1])), model, tuple(f"s{k}" for k in range(len(y))))
    assert fileio.loads_model(fileio.dumps_model(doc)).same_as(doc)


def test_cohort_parsing_details():
    text = "sample_id,label,rs1,rs2\nA,case,ww,MW\nB,control,MM,wm\nC,?,WW,WW\n"
    cohort = fileio.loads_cohort(text)
    assert cohort.labels == [1, -1, None]
    assert cohort.records[0].genotypes == (Genotype.WW, Genotype.WM)


@pytest.mark.parametrize("text, line", [
    ("sample_id,label,rs1\nA,case,XX\n", 2),
    ("sample_id,label,rs1\nA,case,WW\nA,control,WW\n", 3),
    ("sample_id,label,rs1\nA,sick,WW\n", 2),
    ("sample_id,label,rs1\nA,case,WW,MM\n", 2),
    ("id,label,rs1\n", 1),
])
def test_cohort_errors_carry_line(text, line):
    with pytest.raises(SchemaError) as err:
        fileio.loads_cohort(text)
    assert err.value.line == line and f"line {line}" in str(err.value)


@pytest.mark.parametrize("text", [
    "snp_id,n_ww,n_wm,n_mm\nrs1,1,2,3\nrs2,1,1,1\n",
    "snp_id,n_ww,n_wm,n_mm\nrs1,1,-2,3\n",
    "snp_id,n_ww,n_wm,n_mm\nrs1,1,x,3\n",
    "snp_id,n_ww,n_wm,n_mm\n",
])
def test_panel_errors(text):
    with pytest.raises(SchemaError):
        fileio.loads_panel(text)


def test_model_file_errors():
    with pytest.raises(SchemaError):
        fileio.loads_model("not a model\n")
    with pytest.raises(SchemaError):
        fileio.loads_model("snpsvm-model v1\nn\t2\n")
    with pytest.raises(SchemaError):
        fileio.loads_tree("{}")


def test_seventeen_digits():
    assert fileio.fmt(0.1) == "0.10000000000000001"
    assert float(fileio.fmt(1 / 3)) == 1 / 3
