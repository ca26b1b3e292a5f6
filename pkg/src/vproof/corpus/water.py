"""Plant watering: the smallest complete unit proof.

``water`` keeps pouring until at least ``qty`` units reached the plant. The
environment function ``pour`` releases 0, 1 or 2 units. Pours of 0 can
repeat forever, so under a choice-depth bound some paths are cut off
(depth-exhausted). Every path that terminates satisfies ``p >= qty``.
"""

from __future__ import annotations

from ..engine import domain, nd_value, sassert

POUR_AMOUNTS = (0, 1, 2)
QTY_RANGE = range(0, 11)

# 234,619 paths at depth 12 (120,033 complete, 114,586 depth-exhausted)
CONFIG = {"max_depth": 12, "max_paths": 250_000}


def water(ctx, qty, pour):
    p = 0
    while p < qty:
        p += pour(ctx)
    return p


def make_water_proof(qty_values=QTY_RANGE, pour_values=POUR_AMOUNTS):
    qty_domain = domain(qty_values)
    pour_domain = domain(pour_values)

    def pour(ctx):
        return nd_value(ctx, pour_domain, "pour")

    def water_proof(ctx):
        qty = nd_value(ctx, qty_domain, "water.qty")
        p = water(ctx, qty, pour)
        sassert(ctx, p >= qty, "post", site="water:post")

    return water_proof
