"""
Command-line entry point.

Every command prints line-delimited ``key=value`` records on stdout and
exits with a stable code:

    0  success (or a passing verdict)
    1  type error or oracle precondition violation
    2  parse error, unknown label or missing file
    3  evaluation timeout
    4  translation check failed
    5  counterexample or fuzz failure
"""
import logging
import sys
from pathlib import Path
from typing import Iterable, Optional

import click

from app.ifc.core.config import AppConfig, HarnessConfig
from app.ifc.core.errors import (
    EvalTimeout, IFCError, LabelSyntaxError, ParseError, PreconditionError,
    TranslationInvariantError, TypeCheckError,
)
from app.ifc.harness.fuzz import run_fuzz
from app.ifc.service import (
    eval_source, load_text, ni_check_source, translate_source, typecheck_source,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_TYPE = 1
EXIT_PARSE = 2
EXIT_TIMEOUT = 3
EXIT_CHECK = 4
EXIT_COUNTEREXAMPLE = 5


def _emit(records: Iterable[str]) -> None:
    for record in records:
        click.echo(record)


def _fail(code: int, kind: str, message: str, rule: Optional[str] = None) -> None:
    click.echo(f"error={kind}")
    if rule:
        click.echo(f"rule={rule}")
    click.echo(f"message={message}")
    sys.exit(code)


def _run(action) -> None:
    """Run ``action`` and map library errors to exit codes."""
    try:
        action()
    except UnicodeDecodeError as exc:
        _fail(EXIT_PARSE, "parse", f"source is not valid utf-8: {exc}")
    except OSError as exc:
        # missing file, directory, unreadable
        _fail(EXIT_PARSE, "file", str(exc))
    except (ParseError, LabelSyntaxError) as exc:
        _fail(EXIT_PARSE, "parse", str(exc))
    except TypeCheckError as exc:
        _fail(EXIT_TYPE, "type", str(exc), exc.rule)
    except PreconditionError as exc:
        _fail(EXIT_TYPE, "precondition", str(exc))
    except EvalTimeout as exc:
        _fail(EXIT_TIMEOUT, "timeout", str(exc))
    except TranslationInvariantError as exc:
        _fail(EXIT_CHECK, "check", str(exc))
    except IFCError as exc:
        logger.error(f"Unexpected {type(exc).__name__}: {exc}")
        _fail(EXIT_CHECK, "internal", str(exc))


def _load(ctx: click.Context, file: str, lang: Optional[str] = None):
    text = Path(file).read_text(encoding="utf-8")
    src = load_text(text, ctx.obj.get("lattice"))
    if lang and src.language != lang:
        raise ParseError(f"--lang {lang} given but the file is a {src.language} program", 1, 1)
    logger.info(f"Loaded {src.language} program from {file}")
    return src


@click.group()
@click.option("--lattice", default=None, help="Lattice description overriding the file header, e.g. '(powerset a b)'.")
@click.option("--log-level", default=None, help="Logging level (default from IFC_LOG_LEVEL).")
@click.pass_context
def cli(ctx: click.Context, lattice: Optional[str], log_level: Optional[str]):
    """Typecheck, run, translate and test fine- and coarse-grained IFC programs."""
    logging.basicConfig(
        level=(log_level or AppConfig.LOG_LEVEL).upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    ctx.ensure_object(dict)
    ctx.obj["lattice"] = lattice


@cli.command()
@click.argument("file")
@click.option("--lang", type=click.Choice(["fg", "cg"]), default=None, help="Expected source language.")
@click.option("--pc", default=None, help="Program counter label for FG (default bottom).")
@click.pass_context
def typecheck(ctx: click.Context, file: str, lang: Optional[str], pc: Optional[str]):
    """Print the principal type of FILE."""
    _run(lambda: _emit(typecheck_source(_load(ctx, file, lang), pc).records()))


@cli.command(name="eval")
@click.argument("file")
@click.option("--fuel", type=click.IntRange(min=1), default=None, help="Step budget (default IFC_FUEL).")
@click.option("--force", is_flag=True, help="Force a CG computation instead of printing it opaquely.")
@click.option("--seed", type=int, default=0, show_default=True, help="Seed for context inhabitants.")
@click.pass_context
def eval_command(ctx: click.Context, file: str, fuel: Optional[int], force: bool, seed: int):
    """Evaluate FILE and print its value and heap summary."""
    _run(lambda: _emit(eval_source(_load(ctx, file), fuel, force, seed).records()))


@cli.command()
@click.argument("file")
@click.option("--dir", "direction", type=click.Choice(["fg2cg", "cg2fg"]), default=None,
              help="Translation direction (default from the file's language).")
@click.option("--check", is_flag=True, help="Re-typecheck the target against the promised type.")
@click.option("--pc", default=None, help="Program counter label for FG sources.")
@click.pass_context
def translate(ctx: click.Context, file: str, direction: Optional[str], check: bool, pc: Optional[str]):
    """Translate FILE into the other language and print the target program."""

    def action():
        src = _load(ctx, file)
        try:
            report = translate_source(src, direction, check, pc)
        except ValueError as exc:
            raise click.BadParameter(str(exc), param_hint="--dir")
        click.echo(report.target, nl=False)
        _emit([
            f"; direction={report.direction}",
            f"; source_type={report.source_type}",
            f"; target_type={report.target_type}",
        ] + (["; check=ok"] if report.checked else []))

    _run(action)


@cli.command(name="ni-check")
@click.argument("file")
@click.option("--secret-label", default=None, help="Label of the secret (default top).")
@click.option("--observer", default=None, help="Observer label (default bottom).")
@click.option("--samples", type=click.IntRange(min=1), default=None, help="Secret pairs to try (default IFC_NI_SAMPLES).")
@click.option("--seed", type=int, default=None, help="Sampling seed (default IFC_SEED).")
@click.option("--fuel", type=click.IntRange(min=1), default=None, help="Step budget per run.")
@click.pass_context
def ni_check(ctx: click.Context, file: str, secret_label, observer, samples, seed, fuel):
    """Check noninterference of FILE on sampled pairs of secrets."""

    def action():
        verdict = ni_check_source(_load(ctx, file), secret_label, observer, samples, seed, fuel)
        _emit(verdict.records())
        if verdict.status == "counterexample":
            click.echo(f"summary=secrets {verdict.v1} and {verdict.v2} give {verdict.result1} and {verdict.result2}")
            sys.exit(EXIT_COUNTEREXAMPLE)
        click.echo(f"summary={verdict.status} over {verdict.samples} samples ({verdict.timeouts} timeouts)")

    _run(action)


@cli.command()
@click.option("--lang", type=click.Choice(["fg", "cg"]), required=True, help="Source language to generate.")
@click.option("--dir", "direction", type=click.Choice(["fg2cg", "cg2fg"]), default=None,
              help="Also exercise this translation.")
@click.option("--n", "count", type=click.IntRange(min=0), default=100, show_default=True, help="Number of cases.")
@click.option("--size", type=click.IntRange(min=1), default=None, help="Generator node budget (default IFC_GEN_SIZE).")
@click.option("--seed", type=int, default=None, help="Run seed (default IFC_SEED).")
@click.option("--workers", type=click.IntRange(min=1), default=None, help="Worker processes (default IFC_WORKERS).")
@click.option("--replay-dir", default=None, help="Where failing cases are written (default IFC_REPLAY_DIR).")
@click.pass_context
def fuzz(ctx: click.Context, lang, direction, count, size, seed, workers, replay_dir):
    """Generate programs and run the typing, equivalence and noninterference oracles."""
    try:
        summary = run_fuzz(
            lang, direction, count, size,
            HarnessConfig.SEED if seed is None else seed,
            workers, ctx.obj.get("lattice"), replay_dir,
        )
    except ValueError as exc:
        raise click.BadParameter(str(exc), param_hint="--dir")
    _emit(summary.records())
    if not summary.ok:
        sys.exit(EXIT_COUNTEREXAMPLE)


def main():
    cli(obj={})


if __name__ == "__main__":
    main()
