"""Fitted exponent of 1 - f vs n as a function of the dephasing rate.

The n^-2 law holds once 8 gamma T / n << 1 (8 gamma is the decay rate of the
|001>/|111> coherence under L = S_z). This scan shows how far a fixed fit
window sits from that regime for each gamma.
"""

import argparse
import math

from iontrap_dfs.analysis import fit_power_law
from iontrap_dfs.codes import standard_code
from iontrap_dfs.dynamics import initial_state, sweep_alternations


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--gammas", default="0.05,0.125,0.25,0.5,1,2")
    ap.add_argument("--window", default="17,64")
    ap.add_argument("--steps", type=int, default=100)
    args = ap.parse_args()

    lo, hi = (int(x) for x in args.window.split(","))
    print("gamma   exponent   rms")
    for gamma in (float(x) for x in args.gammas.split(",")):
        res = sweep_alternations(range(lo, hi + 1), steps_per_segment=args.steps, gamma=gamma, g=1.0,
                                 T=math.pi, rho0=initial_state("001"), pair=(0, 1),
                                 code=standard_code("C_I"), check_positivity=False)
        fit = fit_power_law([(r.n, r.one_minus_f) for r in res], n_min=lo)
        print(f"{gamma:<7g} {fit.exponent:9.4f}  {fit.residual:.1e}")


if __name__ == "__main__":
    main()
