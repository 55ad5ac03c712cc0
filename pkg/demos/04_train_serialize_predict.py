"""Train the least-squares networks, save them as JSON, load them back.

Two trained variants ride on the same support structure: a binary network
whose activations are centered on the structural support vectors with +/-1
targets, and a multiclass one trained on one-hot targets, either through the
pseudoinverse in one shot or by batch gradient descent on the softmax cross
entropy.  Models serialize to a single JSON file that predicts identically
after loading.
"""

from __future__ import annotations

import os
import warnings

import numpy as np

from ggmargin import (
    Dataset,
    TrainedModel,
    build_graph,
    extract_support,
    fit_multiclass,
    fit_ssv_binary,
    predict_proba,
)

rng = np.random.default_rng(47)
os.makedirs("demos/output", exist_ok=True)

# ---- binary ---------------------------------------------------------------
m_per = 25
X = np.vstack([
    rng.normal([0.0, 0.0], 0.8, size=(m_per, 2)),
    rng.normal([4.0, 0.0], 0.8, size=(m_per, 2)),
])
ds = Dataset(X, np.array([0] * m_per + [1] * m_per), ("off", "on"))
support = extract_support(build_graph(ds), ds)

model = fit_ssv_binary(ds, support)
print(f"binary network: {model.centers.shape[0]} activation centers, "
      f"weights shape {model.weights.shape}")

path = "demos/output/binary_model.json"
model.save(path)
loaded = TrainedModel.load(path)
probe = rng.normal([2.0, 0.0], 1.5, size=(5, 2))
assert np.array_equal(predict_proba(model, probe), predict_proba(loaded, probe))
print(f"saved to {path}; reloaded model predicts bit-identically")
for x, p in zip(probe, predict_proba(loaded, probe)[:, 1]):
    print(f"  query ({x[0]:+.2f}, {x[1]:+.2f}) -> p(on) = {p:.4f}")

# ---- multiclass, both training modes --------------------------------------
centers = np.array([[0.0, 0.0], [6.0, 0.0], [0.0, 6.0]])
X3 = np.vstack([rng.normal(c, 0.9, size=(20, 2)) for c in centers])
y3 = np.repeat(np.arange(3), 20)
ds3 = Dataset(X3, y3, ("ant", "bee", "fly"))
support3 = extract_support(build_graph(ds3), ds3)

for mode in ("pseudoinverse", "gradient"):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # gradient mode may spend its full epoch budget
        m3 = fit_multiclass(ds3, support3, mode=mode)
    acc = float((predict_proba(m3, ds3.X).argmax(axis=1) == ds3.y).mean())
    line = f"multiclass ({mode}): training accuracy {acc:.3f}"
    if mode == "gradient":
        line += (f", {len(m3.loss_history)} epochs, "
                 f"final loss {m3.loss_history[-1]:.6f}")
    print(line)

probe3 = np.array([[3.0, 3.0]])
print("probabilities at the three-way midpoint:",
      np.round(predict_proba(m3, probe3)[0], 3))
