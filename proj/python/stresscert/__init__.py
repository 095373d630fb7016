"""Stress-matrix certificates for lateration frameworks and anchored sensor networks.

Thin wrapper over the compiled extension: instances and matrices travel as the
same JSON documents the CLI reads and writes, and the helpers here parse the
reports into plain dicts.
"""

import json

try:
    from . import _core
except ImportError:  # in-tree build: extension lives on PYTHONPATH, not in the package
    import _core

ParseError = _core.ParseError
OrderNotFound = _core.OrderNotFound
SingularMatrix = _core.SingularMatrix
DegenerateSpan = _core.DegenerateSpan
DimensionMismatch = _core.DimensionMismatch
ResampleBudgetExhausted = _core.ResampleBudgetExhausted
VerificationFailed = _core.VerificationFailed

__all__ = [
    "certify",
    "verify",
    "generate",
    "export_sdp",
    "ParseError",
    "OrderNotFound",
    "SingularMatrix",
    "DegenerateSpan",
    "DimensionMismatch",
    "ResampleBudgetExhausted",
    "VerificationFailed",
]


def certify(instance, backend="rational", skip_rule=True, full_gp_scan=False, order=None):
    """Construct and verify a stress matrix for an instance.

    ``instance`` is instance JSON text or an equivalent dict. Returns a dict
    with the verifier report, the purification trace, and the matrix (entries
    are "p/q" strings on the rational backend).
    """
    if isinstance(instance, dict):
        instance = json.dumps(instance)
    return json.loads(_core.certify_json(instance, backend, skip_rule, full_gp_scan, order))


def verify(instance, matrix, backend="rational"):
    """Verify a stress matrix (dict or JSON text) against an instance."""
    if isinstance(instance, dict):
        instance = json.dumps(instance)
    if isinstance(matrix, dict):
        matrix = json.dumps(matrix)
    return json.loads(_core.verify_json(instance, matrix, backend))


def generate(d, n, anchors=0, seed=1, tree=False, extra_edges=0):
    """Generate a seeded random instance in general position, as a dict."""
    return json.loads(_core.generate_json(d, n, anchors, seed, tree, extra_edges))


def export_sdp(instance, backend="rational"):
    """Export the instance's SDP relaxation as sparse SDPA problem text."""
    if isinstance(instance, dict):
        instance = json.dumps(instance)
    return _core.export_sdp(instance, backend)
