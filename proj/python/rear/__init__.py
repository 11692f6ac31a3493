"""Python bindings for the retrospective event-study engine."""

import json

from ._rear import (
    ConfigError,
    DataError,
    Error,
    IoError,
    NotFoundError,
    __version__,
    benjamini_hochberg,
    cohens_d,
    derive_seed,
    emotion_intensity,
    mann_whitney,
    rng_version,
)
from ._rear import Engine as _Engine


class Engine:
    """A loaded corpus plus key events.

    ``analyze`` takes the same fields as the service's request body and
    returns the same document (result, chart, seed, ...).
    """

    def __init__(self, corpus, events):
        if isinstance(corpus, (str, bytes)) or hasattr(corpus, "__fspath__"):
            corpus = [corpus]
        self._engine = _Engine([str(p) for p in corpus], str(events))

    @property
    def n_documents(self):
        return self._engine.n_documents

    @property
    def n_events(self):
        return self._engine.n_events

    def analyze(self, analysis, **config):
        return json.loads(self._engine.analyze(analysis, json.dumps(config)))

    def datasets(self):
        return json.loads(self._engine.datasets())


__all__ = [
    "ConfigError",
    "DataError",
    "Engine",
    "Error",
    "IoError",
    "NotFoundError",
    "__version__",
    "benjamini_hochberg",
    "cohens_d",
    "derive_seed",
    "emotion_intensity",
    "mann_whitney",
    "rng_version",
]
