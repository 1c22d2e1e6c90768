"""Immutable domain values for skewgraph."""

from skewgraph.models.maps import FiberMap, PLMap, ProductMap, identity_map
from skewgraph.models.measure import Atom, EmpiricalMeasure, FiberLaw, FiberLawKind
from skewgraph.models.results import (
    CodingResult,
    CodingStatus,
    ConcentrationResult,
    ConvergenceRow,
    DecayEstimate,
    DisintegrationCheck,
    GraphSample,
    LogFit,
    OmegaCloud,
    SplitCertificate,
    SyncRow,
    TargetSetResult,
    TransportPlan,
)
from skewgraph.models.sets import BoxUnion, FiberSet, IntervalUnion, full_space
from skewgraph.models.symbols import Cylinder, MarkovSpec, SymbolWindow
from skewgraph.models.system import SkewSystem
from skewgraph.models.zoo import KPairSpec, PerturbationReport, ZooEntry

__all__ = [
    "Atom",
    "BoxUnion",
    "CodingResult",
    "CodingStatus",
    "ConcentrationResult",
    "ConvergenceRow",
    "Cylinder",
    "DecayEstimate",
    "DisintegrationCheck",
    "EmpiricalMeasure",
    "FiberLaw",
    "FiberLawKind",
    "FiberMap",
    "FiberSet",
    "GraphSample",
    "IntervalUnion",
    "KPairSpec",
    "LogFit",
    "MarkovSpec",
    "OmegaCloud",
    "PLMap",
    "PerturbationReport",
    "ProductMap",
    "SkewSystem",
    "SplitCertificate",
    "SymbolWindow",
    "SyncRow",
    "TargetSetResult",
    "TransportPlan",
    "ZooEntry",
    "full_space",
    "identity_map",
]
