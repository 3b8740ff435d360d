"""Python bindings for the reliancescope pipeline and statistics core."""

import json as _json

from . import _reliancescope as _core
from ._reliancescope import (
    DomainError,
    EndpointError,
    Error,
    ValidationError,
    clr_transform,
    cronbach_alpha,
    diff_snapshots,
    games_howell,
    lsa_from_counts,
    lsa_sequences,
    manova_pillai,
    ols_fit,
    paired_t,
    reuse_similarity,
    score_predictions,
    somers_d,
)


def _stage(name):
    fn = getattr(_core, name)

    def run(corpus, out, **kwargs):
        return _json.loads(fn(str(corpus), str(out), **kwargs))

    run.__name__ = name
    run.__doc__ = fn.__doc__
    return run


validate = _stage("validate")
segment = _stage("segment")
classify = _stage("classify")
context = _stage("context")
analyze = _stage("analyze")
benchmark = _stage("benchmark")


def report(corpus, out, **kwargs):
    """Render (and write) the text report, running analyze first if needed."""
    return _core.report(str(corpus), str(out), **kwargs)


def write_fixture(dir, seed=7):
    """Write the seeded synthetic corpus, with gold files, into `dir`."""
    return _json.loads(_core.write_fixture(seed, str(dir)))


__all__ = [name for name in dir() if not name.startswith("_")]
