"""Learning to down-weight noisy training groups
=================================================

Half the training labels are corrupted.  Each group of examples carries a
sigmoid(lam_g) weight in the training loss, and the outer loop adjusts the
40 group weights to minimize clean-validation loss.  Groups dominated by
corrupted labels should end up with visibly smaller weights.
"""

import numpy as np
from scipy.special import expit

from hozog import InnerSolver, ZoConfig, run_hozog
from hozog.data_io import random_classification_dataset
from hozog.problems import group_corruption_fractions, hyperclean_objective, make_hyperclean

dataset = random_classification_dataset(700, 15, n_classes=3, seed=200, class_sep=2.5)
problem = make_hyperclean(
    dataset, n_train=200, n_val=200, n_test=200, n_groups=40, corruption_seed=0
)
spec = hyperclean_objective(problem, InnerSolver(steps=300, lr=0.05))

print(f"{int(problem.corrupted.sum())} of {len(problem.y_train)} training labels corrupted")

lam = run_hozog(
    spec,
    np.zeros(problem.p),
    ZoConfig(q=5, mu=1.0, gamma=1.0, iterations=30, seed=0),
)

weights = expit(lam)
fractions = group_corruption_fractions(problem)
print("\nlearned group weight by corruption level:")
for lo, hi, label in [(0.0, 0.25, "mostly clean  (<=25% bad)"),
                      (0.25, 0.75, "mixed"),
                      (0.75, 1.01, "mostly noise  (>=75% bad)")]:
    mask = (fractions >= lo) & (fractions < hi)
    if mask.any():
        print(f"  {label:28s} {mask.sum():2d} groups  mean weight {weights[mask].mean():.3f}")
