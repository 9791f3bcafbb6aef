"""
Command handlers, one per descriptor command
"""

from app.cli import analytic, arithmetic, bundles

HANDLERS = {
    "check-product": arithmetic.check_product,
    "split-places": arithmetic.split_places,
    "jensen": analytic.jensen,
    "nevanlinna": analytic.nevanlinna,
    "family-height": analytic.family_height,
    "degree": bundles.degree,
    "hn": bundles.hn,
    "height": bundles.height,
}

__all__ = ["HANDLERS"]
