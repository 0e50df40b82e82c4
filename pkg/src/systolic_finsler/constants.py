import math
from typing import Literal


class Tolerance:
    """Numerical tolerances shared across modules."""

    VERTEX_MERGE = 1e-12  # collinear / duplicate vertex merge, relative to body scale
    SYMMETRY = 1e-9  # vertex set equals its negation
    INTERIOR = 1e-9  # strict interiority margin (distance to an edge line)
    LINE_HIT = 1e-10  # residual |m·v - 1| for a vertex on an integer line
    INTEGER = 1e-9  # lattice polygon vertex integrality
    TERMINAL_INTEGER = 1e-6  # integer-line reduction terminal vertex integrality
    CHECK = 1e-9  # flat inequality checks
    BIPOLAR = 1e-10


class Defaults:
    """Default numerical parameters."""

    GRID_SPACING = 1 / 64
    STENCIL = 4
    CONFORMAL_VERTICES = 64
    BASE_POINTS = 16
    QUAD_N = 32
    DIRECTIONS = 16
    HAUSDORFF_DIRECTIONS = 720
    PATCH_PADDING = 1.0
    MAX_PATCH_PADDING = 4.0
    DIAMETER_SAMPLES = 8
    ABT_MAX_STEPS = 10_000
    CURVE_PIECE = 1 / 64
    SEED = 42


class StepKind:
    """Reduction step kinds recorded in traces."""

    INITIAL: Literal["initial"] = "initial"
    MAHLER_PAIR_REMOVAL: Literal["mahler_pair_removal"] = "mahler_pair_removal"
    ABT_PUSH_TO_LINE: Literal["abt_push_to_line"] = "abt_push_to_line"
    ABT_SLIDE_ALONG_LINE: Literal["abt_slide_along_line"] = "abt_slide_along_line"
    VERTEX_MERGE: Literal["vertex_merge"] = "vertex_merge"


class AreaKind:
    """Finsler area notions."""

    BH: Literal["bh"] = "bh"  # Busemann-Hausdorff
    HT: Literal["ht"] = "ht"  # Holmes-Thompson


class Suite:
    """Verification suites."""

    FLAT = "flat"
    LATTICE = "lattice"
    REDUCTION = "reduction"
    FLATTENING = "flattening"
    LOEWNER = "loewner"
    FREEDOM = "freedom"
    ALL = "all"

    ORDER = (FLAT, LATTICE, REDUCTION, FREEDOM, LOEWNER, FLATTENING)


class Constants:
    """Optimal isosystolic constants on the two-torus."""

    LOEWNER = math.sqrt(3) / 2  # flat and non-flat Riemannian
    HERMITE_2 = 2 / math.sqrt(3)
    MINKOWSKI_BH = math.pi / 4  # reversible, BH
    REVERSIBLE_HT = 2 / math.pi  # reversible, HT (Mahler + Minkowski, Sabourau)
    ABT_HT = 3 / (2 * math.pi)  # non-reversible, HT
    MAHLER_MIN = 8.0
    BLASCHKE_MAX = math.pi**2
    PICK_MIN_AREA = 1.5
