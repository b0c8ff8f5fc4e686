"""Irreversible metric measure spaces from scratch.

A quasi-metric keeps positivity and the directed triangle inequality but
drops symmetry.  This walkthrough builds spaces three ways (explicit
matrix, weighted digraph, random generator), validates them, and shows how
forward and backward neighborhoods differ once distances are asymmetric.

Run:  python3 demos/01_irreversible_spaces.py
"""
import numpy as np

from ccmm import (
    backward_neighborhood,
    diameter,
    forward_neighborhood,
    from_digraph,
    random_mm_space,
    reverse,
    validate,
)

# --- a two-point space where going back costs three times as much ----------
space = validate([[0.0, 1.0], [3.0, 0.0]])
print("asymmetric two-point space:")
print(space.dist)

# Forward balls follow the cheap direction, backward balls the expensive one.
print("forward 2-neighborhood of {1}: ", forward_neighborhood(space, [1], 2.0).members)
print("backward 2-neighborhood of {1}:", backward_neighborhood(space, [1], 2.0).members)
print("reversing the space swaps the two notions:")
print(reverse(space).dist)

# --- validation catches broken triangles ------------------------------------
report = validate([[0, 1, 5], [1, 0, 1], [5, 1, 0]])
print("\na matrix that is not a quasi-metric:")
print(report)

# --- shortest-path closure of a digraph is always a quasi-metric ------------
cycle = from_digraph([(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)], 3)
print("\ndirected unit 3-cycle: d(0,1) =", cycle.dist[0, 1],
      " d(1,0) =", cycle.dist[1, 0])

# --- a random irreversible mm-space, the generator the test suite uses ------
mm = random_mm_space(seed=7)
print(f"\nrandom space: n = {mm.n}, diameter = {diameter(mm.space):.3f}, "
      f"max asymmetry = {np.max(mm.dist / np.maximum(mm.dist.T, 1e-300)):.3f}")
print("measure weights:", np.round(mm.weights, 3))
