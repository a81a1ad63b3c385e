"""Exact and pairwise TRC exponents of the AWGN channel at snr = 2.

The pairwise (union bound) curve is exact at low rates; the exact curve
peels away from it where the collective weight of the incorrect codewords
starts to matter, which for snr = 2 is the tightness rate printed below.
"""

import math

import numpy as np

from trcgauss import AwgnSpec, flat_channel, r0_awgn, r_star_awgn, r_tightness, trc_exact_awgn, trc_lower_awgn
from trcgauss.core import GldParams

spec = AwgnSpec(P=2.0, sigma2=1.0, gld=GldParams(1.0))
rs, r0 = r_star_awgn(spec), r0_awgn(spec)
rt = r_tightness(flat_channel(spec.snr, gld=GldParams(math.inf), grid_size=8))

print(f"snr = {spec.snr}")
print(f"critical rate R_* = {rs:.5f}  (straight line E = {r0:.5f} - R beyond it)")
print(f"guaranteed tightness rate R_t = {rt:.5f}")
print()
print(f"{'R':>6} {'pairwise':>10} {'exact':>10} {'gap':>10}")
for R in np.round(np.arange(0.0, 0.36, 0.03), 2):
    lower = float(trc_lower_awgn(R, spec))
    exact = trc_exact_awgn(float(R), spec)
    print(f"{R:6.2f} {lower:10.5f} {exact:10.5f} {exact - lower:10.2e}")
