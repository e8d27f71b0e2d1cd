"""Exact integer linear algebra and module arithmetic."""

from .matrix import (
    IntMatrix,
    as_matrix,
    hnf,
    hnf_with_transform,
    inverse_unimodular,
    lcm,
    left_kernel,
    snf,
    snf_diagonal,
    solve_left,
)
from .module import (
    ZZ,
    FgModule,
    HomGroup,
    ModuleMap,
    Ring,
    all_homs,
    contains,
    coords_in,
    cyclic_sum,
    direct_sum,
    ExtensionCoset,
    extension_coset,
    extensions_along,
    factor_through,
    free_module,
    hom_module,
    image,
    intersect,
    invariant_factors,
    is_contained,
    kernel,
    preimage,
    quadratic_order,
    quotient,
    same_submodule,
    scalar_map,
    simplify,
    submodule,
    sum_submodules,
    unit,
    vadd,
    vscale,
    vsub,
    zero_module,
)
