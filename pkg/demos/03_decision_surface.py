"""Draw the hyperparameter-free decision surface of both activation profiles.

The classifier needs no training pass: support edges between the classes
each contribute a local hyperplane through their midpoint, and a distance
based activation decides which hyperplanes get a say for a given query.  The
exponential profile is sharply local; the bounded tanh profile decays more
gently.  The script fits both on the same two-cluster data and saves their
decision surfaces side by side.
"""

from __future__ import annotations

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from ggmargin import (
    Dataset,
    auc_binary,
    build_chipclass,
    build_graph,
    extract_support,
    predict_proba,
)

rng = np.random.default_rng(29)

m_per = 35
X = np.vstack([
    rng.normal([0.0, 0.0], 0.9, size=(m_per, 2)),
    rng.normal([3.2, 1.8], 0.9, size=(m_per, 2)),
])
y = np.array([0] * m_per + [1] * m_per)
ds = Dataset(X, y, ("low", "high"))

graph = build_graph(ds)
support = extract_support(graph, ds)
print(f"{len(support.edges)} support edges, {support.ssv_indices.size} support vectors")

grid_x, grid_y = np.meshgrid(np.linspace(-3, 6.2, 220), np.linspace(-3, 5, 220))
queries = np.column_stack([grid_x.ravel(), grid_y.ravel()])

fig, axes = plt.subplots(1, 2, figsize=(11, 4.6), sharey=True)
for ax, activation in zip(axes, ("exp", "tanh")):
    model = build_chipclass(ds, support, activation=activation)
    p_train = predict_proba(model, ds.X)[:, 1]
    print(f"chipclass-{activation}: training AUC "
          f"{auc_binary(p_train, ds.y == 1):.4f}")
    p = predict_proba(model, queries)[:, 1].reshape(grid_x.shape)
    ax.contourf(grid_x, grid_y, p, levels=21, cmap="RdBu_r", vmin=0, vmax=1)
    ax.contour(grid_x, grid_y, p, levels=[0.5], colors="k", linewidths=1.2)
    for c, marker in ((0, "o"), (1, "s")):
        pts = ds.X[ds.y == c]
        ax.scatter(pts[:, 0], pts[:, 1], marker=marker, s=18,
                   edgecolors="k", linewidths=0.4)
    mids = model.centers
    ax.scatter(mids[:, 0], mids[:, 1], marker="x", c="k", s=40)
    ax.set_title(f"{activation} activations")

os.makedirs("demos/output", exist_ok=True)
out = "demos/output/decision_surface.png"
fig.tight_layout()
fig.savefig(out, dpi=110)
print(f"saved {out}")
