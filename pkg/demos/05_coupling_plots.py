"""
Pictures of the matchings
=========================

Writes SVG scatter plots (and the matched pairs as CSV) for k=1 and k=32 on
Four Bars, using the command-line entry point. Open the SVGs in a browser.
"""
import os
import sys
import tempfile

from kmixup.cli import main

out_dir = sys.argv[1] if len(sys.argv) > 1 else tempfile.mkdtemp(prefix="kmixup_")
for k, steps in ((1, 128), (32, 4)):
    path = os.path.join(out_dir, f"four_bars_k{k}.svg")
    main(["couple", "--data", "four_bars", "--n", "512", "--k", str(k), "--alpha", "1",
          "--steps", str(steps), "--seed", "0", "--out", path])
    print("wrote", path)
