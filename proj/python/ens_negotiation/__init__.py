"""Python interface to the emotion-aware negotiation pipeline."""

import json

from . import _core
from ._core import (
    EnsError,
    bleu4,
    distinct3,
    dpo_pair_loss,
    fleiss_kappa,
    run_cli,
    select_preference_pairs,
    softplus,
    split_sizes,
    welch_t_test,
)

__all__ = [
    "EnsError",
    "bleu4",
    "distinct3",
    "dpo_pair_loss",
    "fleiss_kappa",
    "parse_tagged_target",
    "render_tagged_target",
    "run_cli",
    "select_preference_pairs",
    "softplus",
    "split_sizes",
    "validate_dialogue",
    "welch_t_test",
]


def render_tagged_target(rationale, response, mask=0):
    """Renders a rationale dict and response as "<R> ... </R> <A> ... </A>"."""
    return _core.render_tagged_target(json.dumps(rationale), response, mask)


def parse_tagged_target(text, mask=None):
    """Returns (rationale dict, response); raises EnsError on malformed text."""
    fields, response = _core.parse_tagged_target(text, mask)
    return json.loads(fields), response


def validate_dialogue(dialogue):
    """Violation messages for a dialogue dict; empty when valid."""
    return _core.validate_dialogue(json.dumps(dialogue))
