"""Tile-based road network generation, scoring and rendering."""
from .bench import ExperimentSpec, RunRecord, StatTable, rank_check, run_experiment, summarize
from .estimators import (
    EAGenerator,
    GWOGenerator,
    MAPElitesGenerator,
    MetricsTransformer,
    PSOGenerator,
    WFCGenerator,
    make_generator,
)
from .fitness import DEFAULT_WEIGHTS, INVALID_FITNESS, FitnessWeights, fitness, grid_fitness
from .grid import (
    GridFormatError,
    build_graph,
    check_grid,
    deserialize,
    load_grid,
    mismatch_count,
    save_grid,
    serialize,
)
from .metrics import BehaviorDescriptor, MetricReport, behavior_descriptor, full_report
from .render import RenderedMap, TileSet, load_tileset, render, synth_tileset
from .repair import RepairResult, repair, repair_full
from .tiles import Direction, TileClass, classify, decode, degree, encode, rotate_ccw, rotate_cw
from .wfc import WfcConfig, WfcFailure, wfc_generate

__version__ = "0.1.0"
