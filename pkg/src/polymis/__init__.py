"""Exact geometric decomposition machinery and approximation schemes for
maximum-weight independent set of polygons and delta-large rectangles.

Submodules:
  geom       exact rational primitives and predicates
  oracle     exact MWIS solvers (ground truth, leaf solver)
  instances  instance files and seeded generators
  corridors  L-infinity medial axis and corridor decomposition
  cuttings   rho-samples, heavy corridors, decay experiment, 1/r-cuttings
  separator  dual graph, cycle separator, cheap balanced cuts
  qptas      recursive scheme on cheap balanced cuts
  blocks     grid partition, trail/ring DP, block and rectangle PTAS
  cli        command-line entry point
"""

__version__ = "0.1.0"
