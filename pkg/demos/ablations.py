"""
How stable is the score to things that should not matter?
=========================================================

A useful proxy must rank the same architectures highly regardless of
which batch it saw, which seed initialized the weights, or (within
reason) the batch size.  The ablation harness reruns one architecture's
score while varying exactly one factor.
"""

import numpy as np

from naswot import Genotype, NetworkConfig, OpKind, ablation_run, normalize_by_min, parse_arch

arch = parse_arch(
    "|nor_conv_3x3~0|+|nor_conv_1x1~0|nor_conv_3x3~1|+|skip_connect~0|none~1|nor_conv_3x3~2|"
)
config = NetworkConfig.desk()

# 1. fresh random batch each repeat, same weights
by_batch = ablation_run(arch, config, mode="batches", repeats=8, batch_size=16)
values = [s.value for s in by_batch["batches"] if s.is_valid]
print(f"batch resampling:   mean {np.mean(values):9.4f}  spread {np.ptp(values):.4f}")

# 2. fresh weight init each repeat, same batch
by_init = ablation_run(arch, config, mode="inits", repeats=8, batch_size=16)
values = [s.value for s in by_init["inits"] if s.is_valid]
print(f"weight re-init:     mean {np.mean(values):9.4f}  spread {np.ptp(values):.4f}")

# 3. unstructured random inputs each repeat (no dataset statistics at all)
by_noise = ablation_run(arch, config, mode="random_inputs", repeats=8, batch_size=16)
values = [s.value for s in by_noise["random_inputs"] if s.is_valid]
print(f"pure-noise inputs:  mean {np.mean(values):9.4f}  spread {np.ptp(values):.4f}")

# 4. batch-size ladder; raw scores grow with batch size (a bigger kernel
# has a bigger determinant) so compare each group against its own minimum
ladder = ablation_run(arch, config, mode="batch_sizes", repeats=4)
normalized = normalize_by_min(ladder)
print("\nbatch size   raw mean   over group min")
for size in ("32", "64", "128", "256"):
    raw = [s.value for s in ladder[size] if s.is_valid]
    rel = [v for v in normalized[size] if v is not None]
    print(f"{size:>10}  {np.mean(raw):9.4f}  {np.mean(rel):14.6f}")
