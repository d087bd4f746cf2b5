"""Free-fermion entanglement on self-similar lattices.

Library layout:

* ``lattice`` — digit-rule lattices, squares, dimensions, adjacency
* ``models`` — one- and two-band tight-binding Hamiltonians + dispersions
* ``spectral`` — diagonalization, occupations, density of states, gaps
* ``entanglement`` — partitions, entropy, spectrum, per-site contour
* ``efractal`` — billiard-loop overlay masks and contour-overlap scores
* ``analysis`` — scaling fits, depth profiles, reconstruction, baselines
* ``pipeline`` / ``reproduce`` / ``cli`` — artifact-producing front ends
"""

__version__ = "0.1.0"

from .lattice import (  # noqa: F401
    FractalDims,
    IterationRule,
    Lattice,
    build_carpet,
    build_generalized,
    build_square,
    hausdorff_dims,
    neighbors,
)
from .models import (  # noqa: F401
    build_h1,
    build_h2,
    dispersion_h1,
    dispersion_h2,
    orbital_rows,
)
from .spectral import (  # noqa: F401
    EigenSystem,
    correlation_matrix,
    diagonalize,
    dos_exact,
    dos_kpm,
    gap_series,
    max_gap,
    nearest_pure_filling,
    occupy,
)
from .entanglement import (  # noqa: F401
    Contour,
    EntanglementSpectrum,
    Partition,
    binary_entropy,
    contour_for_correlation,
    entanglement_contour,
    entanglement_entropy,
    entanglement_spectrum,
    entropy_from_spectrum,
    partition_I,
    partition_II,
    partition_III,
    partition_IV,
    partition_from_mask,
    partition_half_cut,
    read_mask_file,
    write_mask_file,
)
from .efractal import (  # noqa: F401
    EFMask,
    LoopFamily,
    default_offsets,
    ef_compose,
    ef_families,
    ef_overlap,
    ef_self_similarity,
    orbit_cells,
    orbit_vertices,
)
from .analysis import (  # noqa: F401
    BaselineResult,
    ContourProfiles,
    FitResult,
    ProfileFit,
    Reconstruction,
    ScalingSeries,
    baseline_window,
    contour_profiles,
    fit_powerlaw_ee,
    fit_powerlaw_profile,
    fit_superarea,
    reconstruct_ee,
    square_lattice_baseline,
    triadic_window,
    widom_U,
)
from .errors import (  # noqa: F401
    CapacityError,
    FractalentError,
    NumericalError,
    ValidationError,
)
