import click

from app.config import settings


def debug(message: str) -> None:
    """Print a DEBUG line to stderr when ADELIC_DEBUG is set; stdout stays reserved for reports"""
    if settings.debug:
        click.echo(f"DEBUG: {message}", err=True)
