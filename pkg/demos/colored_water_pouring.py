"""Shaping the input spectrum against colored noise.

For noise that is quiet on half the band and loud on the other half, the
optimal input puts more power where the noise is quiet.  The table compares
the bound for a flat input with the bound for the water-poured input at the
same total power.
"""

import numpy as np

from trcgauss import ChannelSpec, optimize_input_spectrum, trc_lower_colored
from trcgauss.spectral import two_level_spectrum, white_spectrum

G = 128
P = 1.0
sz = two_level_spectrum(0.5, 2.0, 0.5, G)
flat = ChannelSpec(white_spectrum(P, G), sz)

print(f"{'R':>6} {'flat input':>11} {'water-poured':>13} {'quiet/loud power':>17}")
for R in (0.01, 0.03, 0.06, 0.1):
    sol = optimize_input_spectrum(R, P, sz, np.ones(G))
    quiet = sol.sx.values[sz.values == 0.5].mean()
    loud = sol.sx.values[sz.values == 2.0].mean()
    print(f"{R:6.2f} {trc_lower_colored(R, flat):11.5f} {sol.exponent:13.5f} "
          f"{quiet:8.3f}/{loud:.3f}")
