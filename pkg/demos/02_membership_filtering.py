"""Score label coherence per sample and filter the suspicious ones out.

Each sample gets a membership score in [0, 1]: the share of its Gabriel
neighbors that agree with its label.  The cardinality form counts neighbors;
the distance form weights them with a Gaussian kernel of bandwidth sigma, so
nearby disagreement hurts more.  Samples scoring strictly below their class
mean are filtered.  Here we plant two flipped labels inside clean blobs and
watch the filter find exactly them.
"""

from __future__ import annotations

import numpy as np

from ggmargin import (
    Dataset,
    FilterModel,
    all_memberships,
    build_graph,
    class_thresholds,
    filter_samples,
)

rng = np.random.default_rng(11)

m_per = 20
X = np.vstack([
    rng.normal([0.0, 0.0], 0.6, size=(m_per, 2)),
    rng.normal([5.0, 0.0], 0.6, size=(m_per, 2)),
])
y = np.array([0] * m_per + [1] * m_per)

# flip one label deep inside each blob
flipped = [3, m_per + 7]
y[flipped[0]] = 1
y[flipped[1]] = 0
ds = Dataset(X, y, ("a", "b"))

graph = build_graph(ds)

q = all_memberships(graph, ds, "cardinality")
print("cardinality membership of the planted flips:",
      [round(float(q[i]), 3) for i in flipped])
print("class means:",
      [round(float(q[ds.y == c].mean()), 3) for c in range(2)])

# the distance form sharpens as sigma shrinks: near neighbors dominate.
# this sample's disagreeing neighbor is the faraway planted flip, so its
# score climbs back toward 1 while the flips stay pinned at 0
mixed = int(np.flatnonzero((q > 0) & (q < 1))[0])
print(f"sample {mixed} has a mixed neighborhood (q = {q[mixed]:.3f}):")
for sigma in (5.0, 1.0, 0.3):
    q_d = all_memberships(graph, ds, "distance", sigma=sigma)
    print(f"  sigma={sigma:4.1f}: q_d = {q_d[mixed]:.4f}")

# the threshold policy removes everything strictly below its class mean;
# with clean blobs the mean is high, so a few honest boundary samples go
# along with the planted flips
memb = all_memberships(graph, ds, "distance", sigma=1.0)
rule = FilterModel(memb, "threshold",
                   thresholds=class_thresholds(memb, ds.y), sigma=1.0)
kept, removed = filter_samples(ds, rule)
print("threshold policy removed:", [int(i) for i in removed])
assert set(flipped) <= set(int(i) for i in removed)

# the count policy is surgical: drop exactly the lowest scorer per class,
# which is the planted flip on both sides
rule = FilterModel(memb, "count", counts=np.array([1, 1]), sigma=1.0)
kept, removed = filter_samples(ds, rule)
print("count policy removed:    ", sorted(int(i) for i in removed))
print("planted flips:           ", flipped)
assert sorted(int(i) for i in removed) == flipped

survivors = ds.subset(kept)
print(f"{survivors.m} samples survive; the graph can now be recomputed on them")
