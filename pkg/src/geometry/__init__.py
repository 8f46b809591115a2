from src.geometry.polytope import (
    Polytope,
    AffineMap,
    intersect,
    affine_image,
    affine_preimage,
    is_empty,
    is_bounded,
    is_solid,
    vertices,
    volume,
    contains,
    interior_point,
    remove_redundant,
    difference,
    bounding_box
)
from src.geometry.partition import (
    Fcp,
    product_fcp,
    total_volume,
    partition_issues,
    dump_polygons,
    format_polygon,
    parse_polygon_line,
    boxes_overlap,
    region_box
)

__all__ = [
    'Polytope',
    'AffineMap',
    'intersect',
    'affine_image',
    'affine_preimage',
    'is_empty',
    'is_bounded',
    'is_solid',
    'vertices',
    'volume',
    'contains',
    'interior_point',
    'remove_redundant',
    'difference',
    'bounding_box',
    'Fcp',
    'product_fcp',
    'total_volume',
    'partition_issues',
    'dump_polygons',
    'format_polygon',
    'parse_polygon_line',
    'boxes_overlap',
    'region_box',
]
