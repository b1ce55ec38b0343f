"""
Splitting a cohort no single line can separate
==============================================

Four clusters in an XOR layout.  One SVM cannot separate them, but
repeated SVM splits stop once every group is at least 80% one label.
"""
import numpy as np

from snpsvm import SplitConfig, classify_by_tree, split_recursive
from snpsvm.splitter import depth, leaves

rng = np.random.default_rng(7)
centers = [(0, 0), (3, 0), (0, 3), (3, 3)]
X = np.concatenate([rng.normal(c, 0.4, size=(20, 2)) for c in centers])
y = np.repeat([1, -1, -1, 1], 20)

tree = split_recursive(X, y, SplitConfig(purity_threshold=0.8))
print("depth", depth(tree))
for leaf in leaves(tree):
    s = leaf.summary
    print(f"{leaf.status.value:12s} label={leaf.majority_label:+d} purity={leaf.purity:.2f} "
          f"n={len(leaf.indices):2d} center={np.round(s.center, 2)} "
          f"stdev-radius={s.radius:.2f} max-dist={s.max_member_distance:.2f}")

# %%
# A new point lands in one leaf; the distance to that leaf's center says
# how typical it is of the group.
for point in ([0.2, 2.8], [3.1, 3.2], [1.5, 1.5]):
    label, share, dist = classify_by_tree(tree, point)
    print(point, "->", label, f"purity {share:.2f}", f"distance {dist:.2f}")

# %%
# Contradictory duplicates cannot be split at all; the tree says so
# instead of recursing.
dup = split_recursive(np.ones((6, 2)), np.array([1, -1] * 3))
print(dup.status.value)
