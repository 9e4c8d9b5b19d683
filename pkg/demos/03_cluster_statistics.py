"""
How often do matches cross between clusters?
============================================

For well separated clusters the optimal matching only crosses between
clusters as often as the batches' cluster counts force it to. The forced
share shrinks like 1/sqrt(k).
"""
import numpy as np

from kmixup.analysis import cross_cluster_stats, endpoint_localization, w2_scaling, manifold_sampler
from kmixup.synthetic import line_cluster_spec, simplex_cluster_spec, two_cluster_spec

spec = two_cluster_spec(D=8.0)
for k in (16, 64, 256):
    st = cross_cluster_stats(spec, k, trials=200, seed=k)
    print(f"k={k:4d} cross fraction {st.cross_cluster_fraction:.4f}  "
          f"x sqrt(k) = {st.scaled_fraction:.3f}  (1/sqrt(pi) = {1 / np.sqrt(np.pi):.3f})  "
          f"count formula exact: {st.forced_exact()}")

# The forced count is exact for equidistant clusters...
st = cross_cluster_stats(simplex_cluster_spec(4, separation=10.0), 32, 200, seed=0)
print("4 equidistant clusters, exact in", int(np.sum(st.cross_counts == st.forced_counts)), "/ 200")
# ...but not when one cluster sits between two others: with squared cost,
# two short hops through the middle cluster beat one long jump.
st = cross_cluster_stats(line_cluster_spec(4, separation=10.0), 32, 200, seed=0)
extra = st.cross_counts - st.forced_counts
print("4 clusters on a line, exact in", int(np.sum(extra == 0)), "/ 200;",
      "mean extra crossings", extra.mean())

# Where do the crossing matches land? Only near the facing sides once there
# are many more points near those sides than there are crossings.
for dim in (1, 2):
    rep = [endpoint_localization(two_cluster_spec(10.0, dim=dim), k, 100, seed=k).violation_fraction
           for k in (8, 256, 2048)]
    print(f"dim={dim} share of crossings outside the facing caps, k=8/256/2048:",
          " ".join(f"{v:.3f}" for v in rep))

# W2^2 between two fresh k-samples of a curve and of a flat square.
for d in (1, 2):
    rep = w2_scaling(manifold_sampler(d, 2), [8, 32, 128, 512], trials=40, seed=d)
    print(f"intrinsic dim {d}: log-log slope {rep.fitted_slope:.2f}")
