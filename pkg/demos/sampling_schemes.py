"""How the initial sampling scheme shapes short-time accuracy.

All three schemes (2p, 4p, ring) reproduce the first and second moments of
the down-polarized initial state, but they differ beyond that: 2p fixes the
transverse components to two anti-correlated points, 4p decorrelates them,
and ring spreads the azimuth uniformly.  On a driven-dissipative chain the
2p ensemble overshoots the early Rabi swing of <S_x>, while 4p and ring
produce statistically indistinguishable curves.

Run time: under a minute at the default settings.
"""

import argparse

import numpy as np

from dctwa.engines import EnsembleConfig, run_ensemble
from dctwa.models import preset


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--n-spins", type=int, default=6)
    parser.add_argument("--n-traj", type=int, default=2_000)
    parser.add_argument("--seed", type=int, default=22)
    args = parser.parse_args()

    pre = preset("rydberg_chain_fig2", n_spins=args.n_spins)
    curves = {}
    for scheme in ("2p", "4p", "ring"):
        cfg = EnsembleConfig(n_traj=args.n_traj, dt=5e-3, t_max=15.0,
                             seed=args.seed, scheme=scheme, n_save=16)
        curves[scheme] = run_ensemble(pre.model, None, cfg, ("Sx",))
        print(f"{scheme}: {args.n_traj} trajectories done")

    times = curves["4p"].times
    print("\n   Jt     S_x (2p)    S_x (4p)    S_x (ring)")
    for k, t in enumerate(times):
        print(f"{t:6.1f}   {curves['2p'].means['Sx'][k]:+.4f}    "
              f"{curves['4p'].means['Sx'][k]:+.4f}    "
              f"{curves['ring'].means['Sx'][k]:+.4f}")

    d_24 = np.abs(curves["2p"].means["Sx"] - curves["4p"].means["Sx"])
    d_4r = np.abs(curves["4p"].means["Sx"] - curves["ring"].means["Sx"])
    k = int(np.argmax(d_24))
    print(f"\nlargest 2p-vs-4p gap: {d_24[k]:.3f} at Jt = {times[k]:.1f} "
          f"(the early overshoot)")
    print(f"largest 4p-vs-ring gap: {d_4r.max():.3f} (statistical noise)")


if __name__ == "__main__":
    main()
