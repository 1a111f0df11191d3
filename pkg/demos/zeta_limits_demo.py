"""Zeta invariants and their large-strength limits.

For an exact system the invariant converges to the alternating sum of
critical values (the transgression pairing).  For a system with circulation
the large part converges to the transgression pairing (minus half the total
variation) while the small part approaches the common descent cost a1
itself at a 1/mu rate; the exponential-cost closed form (e^{a1} - 1)
overshoots by e^{a1} - 1 - a1, which is the deliberately red portion of the
acceptance suite.
"""

import numpy as np

import wittenlab as wl
from wittenlab import circle, morse


def main():
    exact = wl.CircleWittenSystem.from_standard_zeros(
        [(0.0, 1.0, 1), (np.pi, -1.0, 0)], r=0.35, N=256
    )
    oracle = sum((-1.0) ** z.index * exact.h_at(z.position) for z in exact.zeros)
    print("exact system: alternating critical-value sum =", round(oracle, 6))
    for mu in (10.0, 20.0, 30.0):
        res = wl.zeta_invariant(exact, complex(mu, 0.0))
        print(f"  mu={mu:4.0f}: zeta(1,z) = {res.value.real:+.6f}")

    tight = wl.CircleWittenSystem.from_arc_weights(
        [0.0, 2.2], [1, 0], [-0.45, 2.2], r=0.3, N=256
    )
    a1 = wl.instanton_data_circle(tight).a1
    z_la = wl.mathai_quillen_1d(tight).value
    graph = circle.circle_graph(tight)
    prof = morse.analyze_ranks(graph, complex(20.0, 0.0))
    closed_form = morse.z_invariants(graph, prof.m1).small_limit
    print("\ntight system: a1 =", round(a1, 4),
          " transgression limit =", round(z_la, 4))
    print("closed-form small target (e^a1 - 1) =", round(closed_form, 4),
          " linear-cost value a1 * m1 =", round(a1 * prof.m1[1], 4))
    print("\n  mu    zeta_sm     zeta_la     zeta(1,z)")
    for mu in (10.0, 20.0, 30.0):
        res = wl.zeta_invariant(tight, complex(mu, 0.0))
        print(
            f"  {mu:4.0f}  {res.zeta_sm.real:+.6f}  {res.zeta_la.real:+.6f}"
            f"  {res.value.real:+.6f}"
        )
    print("\nthe small part drifts to a1, the large part to the")
    print("transgression value; their sum matches -pi*c*coth(pi*mu*c):")
    for mu in (10.0, 30.0):
        print(
            f"  mu={mu:4.0f}: closed form "
            f"{-np.pi * tight.c / np.tanh(np.pi * mu * tight.c):+.6f}"
        )


if __name__ == "__main__":
    main()
