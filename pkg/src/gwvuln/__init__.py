"""Groundwater vulnerability mapping with DRASTIC, DRASTIC-LU, AHP and fuzzy AHP."""
from gwvuln.classification import (
    ClassBreaks, RatingScheme, apply_rating, classify, jenks_breaks,
)
from gwvuln.grid import Grid, GridHeader, map_cells, read_ascii_grid, sample_at, weighted_sum, write_ascii_grid
from gwvuln.index import IndexModel, build_vulnerability_map, class_area_summary, compute_index
from gwvuln.interpolation import (
    SamplePoint, VariogramModel, empirical_variogram, fit_variogram, idw, kriging,
)
from gwvuln.pipeline import load_config, run_pipeline
from gwvuln.render import render_map
from gwvuln.synthetic import SyntheticScenario, generate
from gwvuln.validation import Observation, binarize, roc_auc, score_wells, zone_coincidence
from gwvuln.weights import (
    FuzzyPairwiseMatrix, PairwiseMatrix, Tfn, ahp_weights, consistency, defuzzify_centroid,
    fuzzy_ahp_weights, matrix_from_priorities, tfn_membership,
)

__version__ = "0.1.0"
