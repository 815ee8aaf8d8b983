"""Python bindings for the ordcollab toolkit."""

import json as _json

from ._ordcollab import (  # noqa: F401
    ConfigError,
    DataError,
    ParseError,
    TrainingError,
    ce_loss,
    oce_loss,
    parameter_count,
    run_cli,
    sample_lambdas,
    synth,
    version,
    weighted_metrics,
)
from . import _ordcollab


def load_dataset(config):
    """Histogram dataset for a config dict (same keys as the CLI config file)."""
    return _ordcollab.load_dataset(_json.dumps(config))


def run_experiment(config, jobs=1):
    """Runs leave-one-group-out evaluation and returns the report as a dict."""
    return _json.loads(_ordcollab.run_experiment(_json.dumps(config), jobs))


def synth_corpus(out_dir, config=None):
    """Writes a synthetic corpus and returns the number of tasks."""
    return synth(str(out_dir), _json.dumps(config or {}))
