"""Prescribing per-index descent costs by a staged vertex potential.

Given raw path integrals of any sign and ascending positive targets, the
algorithm shifts every weight by a constant (the index function drops by one
along each edge) and then raises vertex potentials level by level, so the
final weights are negative, differ from the input by an exact potential, and
realize -max outgoing weight = a_k on every index-k vertex.  An independent
verifier recomputes all three certificates from scratch.
"""

import numpy as np

from wittenlab import weight_prescription as wp
from wittenlab.morse import InstantonGraph


def main():
    graph = InstantonGraph(
        [("u", 2), ("p1", 1), ("p2", 1), ("q1", 0), ("q2", 0)],
        [
            ("u", "p1", 1, 0.6),
            ("u", "p2", -1, -0.3),
            ("p1", "q1", 1, 0.2),
            ("p1", "q2", -1, -0.7),
            ("p2", "q1", 1, -0.1),
            ("p2", "q2", 1, 0.4),
        ],
        require_negative=False,
    )
    problem = wp.PrescriptionProblem(graph, [3.0, 7.0])
    c = wp.choose_constants(problem)
    print("raw amplitude A =", problem.raw_amplitude, " shift constant C =", c)

    result = wp.prescribe(problem)
    print("\nstage measurements:")
    for st in result.stages:
        print(f"  stage {st.k}: b = "
              + ", ".join(f"{v}={b:.3f}" for v, b in sorted(st.b.items())))
    print("\nfinal weights:")
    for e in result.graph.edges:
        print(f"  {e.p} -> {e.q}: {e.weight:+.4f}")

    cert = wp.verify_prescription(problem, result)
    consistent, _ = wp.potential_consistency(problem, result)
    print("\ncertificates: exactness", cert.exactness,
          "| negativity", cert.negativity,
          "| per-index costs", cert.costs_ok,
          "| cycle sums", consistent)

    weights = [e.weight for e in result.graph.edges]
    weights[0] += 0.1
    tampered = wp.PrescriptionResult(
        problem, result.c, result.potential,
        problem.graph.reweighted(weights, require_negative=False),
        result.stages,
    )
    bad = wp.verify_prescription(problem, tampered)
    print("tampered weight caught:", not bad.all_pass,
          "(counterexample:", bad.counterexample, ")")

    rng = np.random.default_rng(1)
    n_ok = sum(
        wp.verify_prescription(p, wp.prescribe(p)).all_pass
        for p in (wp.random_feasible_problem(rng) for _ in range(100))
    )
    print(f"\nrandom feasible problems verified: {n_ok}/100")


if __name__ == "__main__":
    main()
