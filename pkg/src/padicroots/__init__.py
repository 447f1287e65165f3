"""Exact p-adic root analysis for circuit-presented integer polynomials.

The package computes, with exact arithmetic throughout:

  * p-adic valuations, norms, and finite digit expansions of rationals;
  * sparse univariate polynomial arithmetic over the rationals, with
    Newton polygons, root-valuation profiles, and p-adic root counts
    (over the p-adic integers, the p-adic field, and p-adic disks);
  * straight-line programs and additive-complexity circuits, including
    symbolic Newton-polygon propagation through a circuit;
  * exhaustive straight-line program enumeration (shortest-program
    catalogs) and bounded searches for small additive complexity;
  * certified evaluation of closed-form upper bounds on root counts,
    with empirical verification reports comparing bounds to exact counts.

Modules: padic, polynomial, newton, circuit, search, bounds, figures, cli.
"""

from __future__ import annotations

__version__ = "0.1.0"
