"""Graphs of groups with cyclic edge groups."""

from .conjugacy import (
    ConjugacySolver,
    Elliptic,
    GogConjugacyResult,
    Hyperbolic,
    OrbitCapExceeded,
    are_conjugate_elements,
    classify,
)
from .graph import (
    Diagnostics,
    Edge,
    GogError,
    GraphOfGroups,
    PathWord,
    Vertex,
    check_path,
    concat,
    conjugate_by,
    cyclic_reduce,
    equal,
    format_path,
    inverse,
    is_trivial,
    multiply,
    nf_length,
    normal_form,
    path_key,
    path_power,
    reduce_path,
    require_valid,
    validate,
)
from .presentation import (
    GogHom,
    Presentation,
    RelationError,
    StrictnessReport,
    check_strict,
    from_word,
    loop_of_generator,
    map_path,
    pi1_presentation,
    to_word,
    twist,
    vertex_automorphism,
)
from .vertex import AbelianVertexGroup, FreeVertexGroup, GraphVertexGroup
