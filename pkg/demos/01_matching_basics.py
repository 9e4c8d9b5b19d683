"""
Matching two k-batches
======================

Two batches of k points are paired up by the permutation that minimizes the
total squared distance. Mixing each pair with one shared weight gives the
vicinal points that k-mixup trains on.
"""
import numpy as np

from kmixup import MixupConfig, cost_matrix, make_vicinal_step, solve_assignment, w2_squared
from kmixup.synthetic import gen_clusters, two_cluster_spec

# A hand-sized example: two points on a line against two shifted points.
a = np.array([[0.0], [1.0]])
b = np.array([[1.0], [2.0]])
print("cost matrix\n", cost_matrix(a, b))
print("assignment", solve_assignment(cost_matrix(a, b)).sigma, "W2^2 =", w2_squared(a, b))

# Two separated clusters. With k=1 a random partner is often in the other
# cluster; with larger k the matching mostly stays inside each cluster.
ds = gen_clusters(two_cluster_spec(D=3.0), 1024, seed=0)
rng = np.random.default_rng(1)
for k in (1, 4, 32, 128):
    cfg = MixupConfig(k=k, alpha=1.0)
    steps = max(1, 512 // k)
    cross = []
    for _ in range(steps):
        vb = make_vicinal_step(ds, cfg, rng)
        cross.append(ds.cluster_id[vb.gamma_index] != ds.cluster_id[vb.xi_index])
    print(f"k={k:4d}  share of pairs that cross clusters: {np.mean(np.concatenate(cross)):.3f}")

# Each vicinal point records its parents and the weight used.
vb = make_vicinal_step(ds, MixupConfig(k=4, alpha=1.0), rng)
for p in vb:
    print(f"lambda={p.lam:.3f} parents=({p.parent_gamma_index}, {p.parent_xi_index}) "
          f"label={np.round(p.label, 3)}")
