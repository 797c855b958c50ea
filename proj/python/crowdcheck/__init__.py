"""Crowd-flag fake news detection simulator."""

from ._crowdcheck import (
    ConfigError,
    Graph,
    GraphError,
    ProtocolError,
    flagging_params,
    news_fake_posterior,
    policies,
    run_experiment,
    run_simulation,
    topx,
    version,
)

__all__ = [
    "ConfigError",
    "Graph",
    "GraphError",
    "ProtocolError",
    "flagging_params",
    "news_fake_posterior",
    "policies",
    "run_experiment",
    "run_simulation",
    "topx",
    "version",
]
