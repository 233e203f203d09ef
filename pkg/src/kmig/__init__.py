"""Kirchhoff-migration imaging of small dielectric objects from
limited-aperture multi-static microwave data."""

from .errors import (AmbiguousDataError, CalibrationError, ConfigurationError,
                     DomainError, GeometryMismatchError, IncompleteDataError,
                     KmigError, ParseError, UnsupportedSceneError)
from .forward import (PointTarget, Scene, SmallObject, born_scattered, green,
                      load_scene, point_target_scattered, save_scene, simulate_matrix)
from .fresnel_io import (CalibrationResult, FresnelRecord, calibrate,
                         parse_fresnel_file, read_fresnel_file,
                         scattered_from_records, synthesize_records, write_exp_file,
                         write_records_csv)
from .geometry import (ArrayConfig, Frequency, MediumParams, default_config,
                       default_medium, load_config, wavelength, wavenumber)
from .gridio import GridRegion, ImageGrid, compare_grids
from .imaging import (SteeringVectors, km_map, km_value, local_maxima, steering)
from .msr import MsrMatrix, assemble, build_mask, index_set
from .specfun import bessel_j, bessel_j_row, hankel1_0, hankel1_0_asymptotic
from .theory import (SeriesTruncation, aperture_sum_vs_series, jacobi_anger_partial,
                     structure_kernel, theory_map)

__version__ = "0.1.0"

__all__ = [
    "AmbiguousDataError", "ArrayConfig", "CalibrationError", "CalibrationResult",
    "ConfigurationError", "DomainError", "FresnelRecord", "Frequency",
    "GeometryMismatchError", "GridRegion", "ImageGrid", "IncompleteDataError",
    "KmigError", "MediumParams", "MsrMatrix", "ParseError", "PointTarget",
    "Scene", "SeriesTruncation", "SmallObject", "SteeringVectors",
    "UnsupportedSceneError", "aperture_sum_vs_series", "assemble",
    "bessel_j", "bessel_j_row", "born_scattered", "build_mask", "calibrate",
    "compare_grids", "default_config", "default_medium", "green",
    "hankel1_0", "hankel1_0_asymptotic", "index_set", "jacobi_anger_partial",
    "km_map", "km_value", "load_config", "load_scene", "local_maxima",
    "parse_fresnel_file", "point_target_scattered", "read_fresnel_file",
    "save_scene", "scattered_from_records", "simulate_matrix", "steering",
    "structure_kernel", "synthesize_records", "theory_map", "wavelength",
    "wavenumber", "write_exp_file", "write_records_csv",
]
