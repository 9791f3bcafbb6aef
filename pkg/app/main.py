import sys
from pathlib import Path
from typing import Optional

import click
from pydantic import ValidationError

from app.config import settings
from app.exceptions import AdelicError, InfeasibleInputError
from app.services.runner import FORMATS, emit, parse_descriptor, run
from app.utils.diagnostics import debug


def _guess_format(path: Optional[Path]) -> str:
    if path is not None and path.suffix.lower() == ".toml":
        return "toml"
    return "json"


def _fail(error: AdelicError) -> None:
    click.echo(f"error: {error}", err=True)
    sys.exit(error.exit_code)


@click.command(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--in", "in_path", type=click.Path(exists=True, dir_okay=False, path_type=Path),
              help="Problem descriptor (stdin when omitted)")
@click.option("--format", "fmt", type=click.Choice(FORMATS), default=None,
              help="Descriptor format; guessed from the file suffix, JSON otherwise")
@click.option("--out", "out_path", type=click.Path(dir_okay=False, path_type=Path),
              help="Report destination (stdout when omitted)")
@click.option("--csv/--json", "csv_output", default=None,
              help="Force CSV or JSON; grid commands default to CSV")
@click.version_option(settings.app_version, prog_name=settings.app_name)
def cli(in_path: Optional[Path], fmt: Optional[str], out_path: Optional[Path], csv_output: Optional[bool]):
    """
    Run one problem descriptor and emit its report

    Exit codes: 0 success, 2 descriptor error, 3 numerical guard, 4 infeasible
    or unsupported input.
    """
    text = in_path.read_text(encoding="utf-8") if in_path else sys.stdin.read()
    fmt = fmt or _guess_format(in_path)

    try:
        descriptor = parse_descriptor(text, fmt)
        debug(f"running {descriptor.command} with {settings.threads} threads")
        report = run(descriptor)
        payload = emit(report, csv_output)
    except AdelicError as e:
        _fail(e)
    except ValidationError as e:
        # intermediate values rejected by a model (e.g. an all-zero point)
        _fail(InfeasibleInputError(e.errors()[0]["msg"]))

    if out_path is not None:
        out_path.write_bytes(payload)
    else:
        sys.stdout.buffer.write(payload)
        sys.stdout.flush()


if __name__ == "__main__":
    cli()
