"""Intent classification: fuzzy matching, KNN, CNN and RNN over 22 classes."""

from kasper.intent.classes import CLASSES, N_CLASSES, Dataset, Example, Prediction
from kasper.intent.fuzzy import fuzzy_classify, levenshtein
from kasper.intent.knn import knn_classify
from kasper.intent.text import EmbeddingTable, load_embeddings, random_embeddings, tokenize
from kasper.intent.training import TrainConfig, evaluate, predict, train_model

__all__ = [
    "CLASSES", "N_CLASSES", "Dataset", "Example", "Prediction",
    "fuzzy_classify", "levenshtein", "knn_classify",
    "EmbeddingTable", "load_embeddings", "random_embeddings", "tokenize",
    "TrainConfig", "evaluate", "predict", "train_model",
]
