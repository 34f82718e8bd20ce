"""Worked applications of the distance-majorization machinery."""

from .convex_regression import ConvexRegFit, convex_reg_fit, predict_convex
from .cosine import cosine_mm_iterate, cosine_surrogate, summa_gap
from .dnn import DnnResult, dnn_project
from .fire_station import (FireStationResult, Rectangle, fire_station,
                           l1_station_objective, l2_station_objective,
                           weiszfeld)
from .isotone import IsotoneFit, isotone_fit
from .svm import SvmModel, kernel_svm_prepare, svm_fit

__all__ = [
    "ConvexRegFit", "convex_reg_fit", "predict_convex",
    "cosine_mm_iterate", "cosine_surrogate", "summa_gap",
    "DnnResult", "dnn_project",
    "FireStationResult", "Rectangle", "fire_station",
    "l1_station_objective", "l2_station_objective", "weiszfeld",
    "IsotoneFit", "isotone_fit",
    "SvmModel", "kernel_svm_prepare", "svm_fit",
]
