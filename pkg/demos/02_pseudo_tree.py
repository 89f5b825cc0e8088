#!/usr/bin/env python3
"""Pseudo-tree construction: how agents get ordered for aggregation.

The solver organizes agents as a breadth-first spanning tree of the
constraint graph. Tree edges carry cost aggregation and best-particle
broadcasts; the remaining graph edges only exchange positions.
"""

from cdcop import build_bfs, tree_edge_dump, validate_pseudo_tree
from cdcop.benchmarks import gen_erdos_renyi, gen_random_tree

instance = gen_erdos_renyi(n=10, p=0.35, seed=7)
print(f"random graph: {instance.num_agents} agents, {instance.num_edges} constraints")

tree = build_bfs(instance, root=0)
print(f"root {tree.root}, height {tree.height}")
print("parents:", tree.parent)
print("levels:", tree.levels())
print("validation:", validate_pseudo_tree(tree, instance) or "ok")

print("\nedge roles:")
for u, v, tag in tree_edge_dump(tree, instance):
    print(f"  {u} -- {v}: {tag}")

# The root is a free choice; height (and so per-cycle hop count) depends on it.
print("\nheight by root choice:")
for root in range(instance.num_agents):
    print(f"  root {root}: height {build_bfs(instance, root).height}")

# Trees have no non-tree edges at all.
chain = gen_random_tree(n=8, seed=3)
tags = {tag for _, _, tag in tree_edge_dump(build_bfs(chain, 0), chain)}
print(f"\nrandom tree instance: edge roles = {tags}")
