"""Scale mixtures of normals, their mixing laws and related radial densities."""
from .mixing import (
    DiscreteLaw,
    DivergentMomentError,
    GammaLaw,
    InverseGammaLaw,
    MixingLaw,
    PointMass,
    SumLaw,
    add_laws,
    inverse_half_moment,
    mixing_from_spec,
    simplify,
    student_mixing,
    weighted_inverse_moment,
)
from .noncentral import LaplaceValues, noncentral_scaled_chisq_laplace, sample_noncentral_scaled_chisq
from .radial import RadialDensity, kotz_density, kotz_inverse_second_moment
from .smn import (
    DimensionMismatchError,
    SmnDensity,
    convolve,
    eval_density,
    eval_radial,
    marginal_cdf,
    marginal_pdf,
    normal,
    sample,
    student_t,
    student_t_pdf,
    total_mass,
)

__all__ = [
    "DimensionMismatchError",
    "DiscreteLaw",
    "DivergentMomentError",
    "GammaLaw",
    "InverseGammaLaw",
    "LaplaceValues",
    "MixingLaw",
    "PointMass",
    "RadialDensity",
    "SmnDensity",
    "SumLaw",
    "add_laws",
    "convolve",
    "eval_density",
    "eval_radial",
    "inverse_half_moment",
    "kotz_density",
    "kotz_inverse_second_moment",
    "marginal_cdf",
    "marginal_pdf",
    "mixing_from_spec",
    "noncentral_scaled_chisq_laplace",
    "normal",
    "sample",
    "sample_noncentral_scaled_chisq",
    "simplify",
    "student_mixing",
    "student_t",
    "student_t_pdf",
    "total_mass",
    "weighted_inverse_moment",
]
