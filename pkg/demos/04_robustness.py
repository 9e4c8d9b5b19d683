"""
FGSM robustness after k-mixup
=============================

Models trained with k=1 and k=2 on One Ring, probed with one-step sign
gradient attacks of growing size. Epsilon is in raw feature units.
"""
import numpy as np

from kmixup.mixup import MixupConfig
from kmixup.nn import TrainConfig, adversarial_accuracy, train
from kmixup.synthetic import gen_one_ring, train_test_split

epsilons = [0.0, 0.01, 0.02, 0.05, 0.1, 0.2]
seeds = range(3)
curves = {}
for k in (1, 2):
    runs = []
    for seed in seeds:
        tr, te = train_test_split(gen_one_ring(1000, seed=seed), 0.2, seed=seed)
        model, _ = train(tr, te, TrainConfig(epochs=100, milestones=(50, 75),
                                             mixup=MixupConfig(k=k, alpha=1.0), seed=seed))
        runs.append([adversarial_accuracy(model, te, e) for e in epsilons])
    curves[k] = np.mean(runs, axis=0)

print("epsilon " + " ".join(f"{e:>7g}" for e in epsilons))
for k, c in curves.items():
    print(f"k={k:<5d} " + " ".join(f"{v:7.3f}" for v in c))
