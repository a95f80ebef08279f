"""Negation detection and evaluation for Dutch clinical text.

The package splits into small, composable modules:

* :mod:`negare.textseg` — tokenizer, sentence splitter, token windows.
* :mod:`negare.corpus` — annotated-corpus model, filtering, folds, stats.
* :mod:`negare.context_engine` — the rule-based negation detector.
* :mod:`negare.predictions` — interchange format and majority voting.
* :mod:`negare.evaluation` — metrics, kappa, error analysis.
* :mod:`negare.cli` — the ``negare`` command.
"""

from negare.errors import NegareError

__all__ = ["NegareError"]
__version__ = "0.1.0"
