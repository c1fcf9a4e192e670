"""Multi-graph attentional code clone detection."""

__version__ = "0.1.0"

from .bundle import GraphBundle, build_bundle
from .featurize import Vocab, build_vocab, featurize, featurize_bundle, normalized_adjacency
from .network import ModelConfig, forward_pair, init_params, mse_loss, similarity

__all__ = [
    "GraphBundle", "build_bundle",
    "Vocab", "build_vocab", "featurize", "featurize_bundle", "normalized_adjacency",
    "ModelConfig", "forward_pair", "init_params", "mse_loss", "similarity",
    "__version__",
]
