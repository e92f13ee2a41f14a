"""Quasi-integrals with respect to deficient topological measures on grids."""
from .functionals import as_functional, measure_of_functional, mu_hat
from .grid_space import (
    GridFunction,
    Region,
    Side,
    SpaceModel,
    build_space,
    connected_components,
    is_solid,
    level_set,
    oscillation,
    region_from_spec,
    urysohn_ramp,
)
from .measures import CellMass, Containment, SimpleSolid, classify, linear_combo, restrict
from .quasi_integral import derived_measure, distribution, integrate, lemma45_witness

__version__ = "0.1.0"
