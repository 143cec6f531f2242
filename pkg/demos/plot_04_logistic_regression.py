"""
Bayesian logistic regression on a ball
======================================

Coefficients get a uniform prior on the unit ball in three dimensions.
We compare SRNSGLD and PSGLD by the accuracy of the chain states on the
training and test splits.
"""

# %%
import numpy as np

from skewflect.harness.config import build_config
from skewflect.harness.experiments import bayes_logreg

cfg = build_config("bayes_logreg", {"seeds": [0, 1, 2], "chains": 50})
res = bayes_logreg(cfg)
print("train/test sizes:", res.train.n, res.test.n)

# %%
# ``aggregate`` averages the chain-mean accuracy curves across seeds.
for (alg, split), (mean, std, count) in sorted(res.aggregate().items()):
    picks = [0, 2, 10, len(mean) - 1]
    shown = ", ".join(f"it {res.iterations[i]}: {mean[i]:.3f}" for i in picks)
    print(f"{alg:8s} {split:5s}  {shown}  (std at end {std[-1]:.3f}, {count} seeds)")

# %%
# Every state of every chain stayed in the ball.
worst = max(np.linalg.norm(tr.states, axis=-1).max() for tr in res.traces.values())
print("largest coefficient norm seen:", worst)
