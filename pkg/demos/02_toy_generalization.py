"""
k-mixup on the toy datasets
===========================

Train the same small network with k=1 (plain mixup) and k=16 on each toy set
and compare test accuracy. Strong mixing (large alpha) blurs class boundaries
when partners are random; matching keeps the mixed points near the data.

Pass a number of epochs as the first argument to run faster, e.g. 60.
"""
import sys
import time

from kmixup.mixup import MixupConfig
from kmixup.nn import TrainConfig, train
from kmixup.synthetic import GENERATORS, train_test_split

epochs = int(sys.argv[1]) if len(sys.argv) > 1 else 200
milestones = (epochs // 2, 3 * epochs // 4)

for name, alpha in (("one_ring", 64.0), ("four_bars", 16.0), ("swiss_roll", 16.0)):
    ds = GENERATORS[name](1000, seed=0)
    tr, te = train_test_split(ds, 0.2, seed=0)
    for k in (1, 16):
        t0 = time.perf_counter()
        cfg = TrainConfig(epochs=epochs, milestones=milestones,
                          mixup=MixupConfig(k=k, alpha=alpha), seed=0)
        _, hist = train(tr, te, cfg)
        print(f"{name:11s} alpha={alpha:<5g} k={k:<3d} test acc {100 * hist[-1].test_acc:6.2f}%"
              f"  ({time.perf_counter() - t0:.1f}s)")
