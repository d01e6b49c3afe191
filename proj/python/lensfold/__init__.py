"""Folding of lens tessellations with curved creases."""

from ._lensfold import (
    CheckRecord,
    FoldReport,
    KiteModule,
    LensError,
    LensProfile,
    LensTessellation,
    MV,
    PatchId,
    TiledFolding,
    build_kite_module,
    check_families,
    flat_correspondence_distance,
    integrate_theta,
    kite_diameter,
    pattern_hash,
    pattern_json,
    pattern_svg,
    prepare_fold,
    sweep_values,
    tile,
    verify,
    visibility_check,
    vstar_limit,
)


def fold(profile, u, v, vstar, n=512, rows=1, cols=1):
    """Prepares the pattern, builds the module at `vstar` and tiles it."""
    setup = prepare_fold(LensTessellation(profile, u, v))
    module = build_kite_module(setup.tess, vstar, n)
    return module, tile(module, rows, cols)


__all__ = [name for name in dir() if not name.startswith("_")]
