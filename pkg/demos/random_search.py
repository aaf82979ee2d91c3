"""
Training-free random search
===========================

Sample architectures uniformly, score each at initialization, keep the
argmax.  No gradients, no training loop; the whole search is a few
hundred forward passes.
"""

import numpy as np

from naswot import NetworkConfig, make_scorer, naswot_search, random_normal_batch

config = NetworkConfig.desk()
batch = random_normal_batch((16, 3, 8, 8), seed=0)
scorer = make_scorer(config, batch)

# 100 samples, fully seeded: rerunning this script prints the same arch
result = naswot_search(100, scorer, rng=42)

print(f"scored {len(result.history)} candidates in {result.wall_time:.2f}s")
print("chosen:", result.chosen.genotype)
print("score: ", result.chosen.score.value)

# the running argmax only ever improves; watch it move through the log
best = None
for candidate in result.history:
    if candidate.score.is_valid and (best is None or candidate.score > best.score):
        best = candidate
        print(f"  draw {candidate.birth:3d}  score {candidate.score.value:9.4f}  {candidate.genotype}")

# degenerate candidates are flagged, never silently preferred
flagged = [c for c in result.history if not c.score.is_valid]
print(f"{len(flagged)} of {len(result.history)} draws were rank-deficient and excluded from the argmax")
