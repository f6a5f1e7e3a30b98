"""Abundance-domain hyperspectral super-resolution.

Arrays are float64 and laid out (height, width, channels); endmember
matrices are (materials, bands).
"""

from ._hsisr import (
    HsisrError,
    bicubic_upsample,
    blur,
    decompose_pca,
    degrade,
    ergas,
    estimate_abundances_ls,
    evaluate,
    extract_endmembers_minvol,
    gaussian_kernel,
    generate_abundance,
    load_abundance,
    load_cube,
    make_phantom,
    pinv,
    psnr,
    reconstruct,
    run_pipeline,
    sam,
    sample_sigma,
    save_abundance,
    save_cube,
    select_pure_pixels,
    super_resolve,
)

__all__ = [
    "HsisrError",
    "bicubic_upsample",
    "blur",
    "decompose_pca",
    "degrade",
    "ergas",
    "estimate_abundances_ls",
    "evaluate",
    "extract_endmembers_minvol",
    "gaussian_kernel",
    "generate_abundance",
    "load_abundance",
    "load_cube",
    "make_phantom",
    "pinv",
    "psnr",
    "reconstruct",
    "run_pipeline",
    "sam",
    "sample_sigma",
    "save_abundance",
    "save_cube",
    "select_pure_pixels",
    "super_resolve",
]
