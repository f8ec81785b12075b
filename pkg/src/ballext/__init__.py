"""Colored 3-balls bounded by strictly 4-colored spheres, and the flip and
subdivision moves that build such spheres from the tetrahedron."""
from .ball_extend import ExtensionResult, extend_parallel_case, extend_to_ball, find_link_tricolor_vertex
from .coloring import Sign, check_coloring, fourth_color, triangle_sign, triangle_signs
from .core import (Complex3, CycleGraph, PreconditionError, StructuralError, Surface2, Tet, Tri,
                   TriangulationError, boundary_surface, isomorphic, validate_complex, validate_surface)
from .disk_fill import enumerate_polygon_fillings, fill_cycle, shell_disk2
from .moves import Flip, MoveSequence, Subdivide, base_tetrahedron, generate_random, replay
from .sequencer import AttachmentOrder, attachment_order, exhaustive_shelling, moves_from_order
from .verify import Certificate, verify_extension, verify_move_sequence

__version__ = "0.1.0"
