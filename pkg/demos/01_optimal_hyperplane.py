"""
The optimal hyperplane for two points
=====================================

Two labelled points, (0, 2) in class +1 and (0, -2) in class -1.  Any line
between them separates the classes; the maximal-margin one is y/2 = 0,
halfway between them, with each point at distance 2.
"""
import math

import numpy as np

from snpsvm import SvmConfig, classify, dual_objective, geometric_margin, train

X = np.array([[0.0, 2.0], [0.0, -2.0]])
y = np.array([1.0, -1.0])

# C = inf asks for the hard-margin machine (no slack allowed)
model, diag = train(X, y, SvmConfig(C=math.inf))
print("w =", model.w, " b =", model.b)
print("alphas =", model.alphas)
print("margin half-width =", geometric_margin(model))

# %%
# The dual along alpha_1 = alpha_2 = a is 2a - 8a^2.  Its peak at a = 1/8
# has value 1/8, which equals |w|^2 / 2 for w = (0, 1/2).
for a in (0.0, 0.0625, 0.125, 0.1875, 0.25):
    print(f"a={a:.4f}  W={dual_objective([a, a], X, y):.5f}")
print("primal 1/2|w|^2 =", 0.5 * model.w @ model.w)

# %%
# New points are classified by which side of the line they fall on.
for point in ([0, 3], [5, -0.1], [0, 0]):
    print(point, classify(model, point))
