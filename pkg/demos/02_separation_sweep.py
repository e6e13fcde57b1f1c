"""How the extracted energy falls off with the A-B separation.

The envelope estimate suggests E_B ~ (l/L)^5, but the full first-order
integral is an oscillatory kernel integrated against the feedback
packet: it decays fast, is non-monotonic, and even changes sign near
L = 4.5 l before settling onto its tail.  This script tabulates both
the integral and the envelope across L and fits the magnitude slope.
"""

import numpy as np

from edgeqet import params as P
from edgeqet.energetics import (compute_EB, eb_order_estimate,
                                fit_scaling_exponent)

UEV = 1e6 / P.E_CHARGE

base = P.default_paper_params()
ratios = np.array([2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0, 6.0, 8.0])

print(f"{'L/l':>5s} {'E_B [ueV]':>12s} {'envelope [ueV]':>15s} "
      f"{'|ratio|':>8s}")
rows = []
for r in ratios:
    p = P.validate(base.replace(L=r * base.l))
    e_b = compute_EB(p, rel_tol=1e-4)
    est = eb_order_estimate(p)
    rows.append((r, e_b, est))
    print(f"{r:5.1f} {e_b * UEV:12.4f} {est * UEV:15.4f} "
          f"{abs(est / e_b):8.3f}")

# the sign change: bracket it between the last positive and first
# negative entry
signs = np.sign([e for _, e, _ in rows])
flip = np.argmax(signs[:-1] * signs[1:] < 0)
print(f"\nsign change between L = {rows[flip][0]:.1f} l "
      f"and {rows[flip + 1][0]:.1f} l: the Coulomb kernel oscillates, "
      "so 'extraction' turns into weak injection at large separation")

# magnitude slope over the conventional window
window = [3 * base.l, 4 * base.l, 5 * base.l, 6 * base.l]
slope = fit_scaling_exponent(base, window, rel_tol=1e-4)
print(f"log|E_B| vs log L slope over 3l..6l: {slope:.3f} "
      "(envelope would give -5; the sign-changing integral is steeper "
      "in places and shallower in others)")

# the envelope is exactly a power law, as a control
slope_env = fit_scaling_exponent(base, window, use_order_estimate=True)
print(f"envelope slope (control):            {slope_env:.3f}")
