"""Short Monte-Carlo sweep and curve fit for the [[30,6,4]] code.

The budget is small so the script finishes in under a minute; raise
``STOP`` for publication-quality numbers.
"""

import numpy as np

from tbcode.code_builder import build_code, parse_spec
from tbcode.decoder import DecoderConfig
from tbcode.simulator import StopRule, fit_curve, monte_carlo, pseudo_threshold

STOP = StopRule(max_shots=200_000, target_failures=100)

code = build_code(parse_spec("l=5 m=3 A=x^4+z^3 B=x^4+x+z^4+y"), with_logicals=False)
ps = np.geomspace(1e-2, 1e-1, 6)
stats = monte_carlo(code, DecoderConfig(), ps, STOP, seed=1)
for s in stats:
    print(f"p={s.p:.4f}  p_L={s.p_l:.3e}  [{s.ci_low:.2e}, {s.ci_high:.2e}]  ({s.failures}/{s.shots})")

fit = fit_curve([(s.p, s.p_l) for s in stats])
print(f"d_fit = {fit.d_fit:.2f}")
print(f"pseudo-threshold against one bare qubit: {pseudo_threshold(fit, 1):.4f}")
print(f"extrapolated p_L at p = 1e-4: {float(fit(1e-4)):.1e}")
