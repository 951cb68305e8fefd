"""Triangle-equality assignment formulations for the Turnpike / Partial
Digest problem.

Submodules:

- ``core``: point sets, distance multisets, rulers, assignments
- ``partitions``: two-partition enumeration and separation gaps
- ``model``: MILP / triangle-ILP / triangle-LP construction and pruning
- ``solver``: phase-one simplex LP solver and branch-and-bound
- ``noise``: bounded-noise-plus-rounding observation model
- ``pipeline``: assignment-first reconstruction pipeline
- ``metrics``: assignment-first evaluation metrics
- ``bench``: generators, realizability oracle, experiment harnesses
- ``serialize`` / ``lpfile``: JSON, CSV and LP-format interchange
- ``service`` / ``cli``: HTTP service and its thin command-line client
"""

__version__ = "0.1.0"
