from .convolutional import ConvCode, DecisionMode, conv_encode, path_metric, viterbi_decode
from .demod import psk_hard_demod, psk_soft_demod
from .normal_approx import NormalApproxPoint, capacity, dispersion, normal_approx_point, normal_approximation

__all__ = [
    "ConvCode",
    "DecisionMode",
    "NormalApproxPoint",
    "capacity",
    "conv_encode",
    "dispersion",
    "normal_approx_point",
    "normal_approximation",
    "path_metric",
    "psk_hard_demod",
    "psk_soft_demod",
    "viterbi_decode",
]
