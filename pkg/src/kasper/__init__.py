"""Kasper: a local voice-assistant runtime.

Modules: ``fsm`` (generic state machine), ``assistant`` (Kasper states and
interrupt handling), ``audio`` (framing and hotword detection),
``transcriber`` (letter decoding), ``intent`` (classifiers), ``brain``
(query service), ``sim`` and ``corpus`` (simulation and data), ``cli``.
"""

from importlib import resources

__version__ = "0.1.0"


def data_path(name: str):
    """Path of a file bundled under ``kasper/data``."""
    return resources.files("kasper").joinpath("data", name)
