"""tdual: topological T-duality toolkit for semi-free circle actions.

Subpackages by concern:

* :mod:`tdual.expr`       exact symbolic expression trees and seeded equality
* :mod:`tdual.geometry`   metrics, B-fields, Buscher dualization
* :mod:`tdual.intlin`     integer matrices, Smith normal form, lattices
* :mod:`tdual.complexes`  finite cell complexes, products, quotients
* :mod:`tdual.cohomology` integer (co)homology, pairs, cross products
* :mod:`tdual.gerbes`     Cech cocycle 2-/3-gerbes and their dualization
* :mod:`tdual.semifree`   classification and T-duals of semi-free circle spaces
* :mod:`tdual.cli`        command-line front end
"""

__version__ = "0.1.0"
