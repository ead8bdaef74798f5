"""Learned surrogates for contact-state classification between 2D blocks.

An exact geometric oracle labels how two convex polygons touch; a
Takagi-Sugeno fuzzy system (rules seeded by subtractive clustering) and a
labeled Kohonen map learn to reproduce those labels from block features;
a window-scanning pipeline fuses the two over a block domain.
"""

from ._backend import BACKEND
from .errors import (
    ContactLabError,
    DegenerateFiring,
    DimensionMismatch,
    EmptyData,
    InsufficientData,
    NonFinite,
    OverlapError,
    SingularSystem,
    SizeTooLarge,
    UnlabeledGrid,
    WrongVertexCount,
)
from .geometry import Block, ContactState, classify_contact, min_separation, polygon_area
from .anfis import (
    GaussianMf,
    TskModel,
    TskRule,
    consequent_eval,
    firing_strength,
    infer,
    infer_batch,
    load_model,
    mf_eval,
    predict_contact_state,
    save_model,
    train_hybrid,
)
from .subclust import SubclustParams, calibrate_radius, rules_from_clusters, subtractive_cluster
from .som import (
    SomGrid,
    SomSchedule,
    find_winner,
    initialize_grid,
    label_neurons,
    load_grid,
    save_grid,
    som_classify,
    train_som,
)
from .pipeline import (
    Dataset,
    Sample,
    Scene,
    Window,
    build_dataset,
    default_scene,
    evaluate,
    extract_features,
    gravity_features,
    random_windows,
    samples_from_series,
    scan_windows,
    simulate,
)

__version__ = "0.1.0"
