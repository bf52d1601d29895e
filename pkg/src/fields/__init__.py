"""
Neural field engine: single-field numerics and the projection network
"""

from src.fields.core import (
    FieldMap,
    Grid,
    LateralKernel,
    Peak,
    StepParams,
    count_bubbles,
    decode_peak,
    euler_step,
    gaussian_bubble,
    lateral_term,
    make_dog_kernel,
)

__all__ = [
    "FieldMap",
    "Grid",
    "LateralKernel",
    "Peak",
    "StepParams",
    "count_bubbles",
    "decode_peak",
    "euler_step",
    "gaussian_bubble",
    "lateral_term",
    "make_dog_kernel",
]
