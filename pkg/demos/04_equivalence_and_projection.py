"""Equivalence tests and the two ways of marginalizing a graph.

Reversing a covariate edge can leave the model and the causal functional
untouched (causal Markov equivalence).  Marginalizing variables out of the
graph can be done two ways: the classical latent projection keeps the
marginal's full independence structure but needs bidirected edges, while the
saturating reduction stays a DAG by design, which is what makes the reduced
g-formula a plain plugin target.
"""

import causal_reduce as cr

G = cr.parse_graph("""
!treatment A
!outcome Y
A -> Y
I1 -> A
O1 -> Y
W4 -> I1
W4 -> O1
W2 -> W4
W3 -> W4
W1 -> W2
""")

# Same graph with the W1-W2 edge reversed: same skeleton, same colliders,
# same adjustment set, hence the same model and the same functional.
G_REV = cr.parse_graph("""
!treatment A
!outcome Y
A -> Y
I1 -> A
O1 -> Y
W4 -> I1
W4 -> O1
W2 -> W4
W3 -> W4
W2 -> W1
""")

print("markov equivalent       :", cr.markov_equivalent(G, G_REV))
print("causal markov equivalent:", cr.causal_markov_equivalent(G, G_REV))
print()

keep = cr.informative_set(G)
print("informative vertices    :", sorted(keep))

view = cr.latent_projection(G, keep)
print("\nlatent projection onto the informative set:")
print("  directed :", sorted(view.directed_edges))
print("  bidirected:", [tuple(sorted(e)) for e in view.bidirected_edges])

reduced = cr.reduce(G).output
print("\nsaturating reduction (stays a DAG):")
print("  edges    :", sorted(reduced.edges))
print()
print("note the bidirected pair turns into a directed edge plus the")
print("saturation of its neighborhood; both objects represent the same")
print("marginal model, but only the DAG admits a plugin estimator")
