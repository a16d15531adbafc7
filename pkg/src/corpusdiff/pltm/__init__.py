from .coherence import CoherenceReport, npmi_coherence, npmi_pair, sweep_k
from .gibbs import (
    KERNEL_NAME,
    default_alpha,
    dominant_topic,
    infer_theta,
    train,
)
from .labeling import TopicLabel, label_topics, representative_passages, top_words
from .model import PolyTopicModel, load_matrix, save_matrix

__all__ = [
    "CoherenceReport",
    "KERNEL_NAME",
    "PolyTopicModel",
    "TopicLabel",
    "default_alpha",
    "dominant_topic",
    "infer_theta",
    "label_topics",
    "load_matrix",
    "npmi_coherence",
    "npmi_pair",
    "representative_passages",
    "save_matrix",
    "sweep_k",
    "top_words",
    "train",
]
