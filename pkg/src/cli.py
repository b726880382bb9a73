# src/cli.py
"""``covalg`` command group.

Mounted on the Flask CLI (``flask --app app covalg ...``) and runnable on its
own through ``run(argv)`` / ``python -m src.cli``. Reports go to stdout as
JSON. Exit codes: 0 all checks passed, 1 a check failed, 2 malformed input
or a violated precondition.
"""

import sys

import click
from flask import current_app
from flask.cli import AppGroup

from src.exceptions import CovalgError, MalformedInput
from src.schemas.payloads import decode_element, decode_input, encode, encode_error, with_element
from src.services.corpus import EXAMPLES, RHO_CHOICES
from src.services.runner import COMMANDS, RunOptions, run_command, run_example

EXIT_OK, EXIT_FAILED, EXIT_ERROR = 0, 1, 2

covalg = AppGroup("covalg", help="Interactions, covariant representations and crossed products.")


def common_options(f):
    options = [
        click.option("--tol", type=float, default=None, help="Equality tolerance in operator norm."),
        click.option("--seed", type=int, default=None, help="Seed for every sampled check."),
        click.option("--samples", type=int, default=None, help="Random samples per identity."),
        click.option("--x-max", "--xmax", "x_max", type=int, default=None, help="Largest degree checked."),
        click.option("--max-k", "max_k", type=int, default=None, help="Largest k of the norm enclosure."),
        click.option("--window", type=int, default=None, help="Window of the regular amplification."),
        click.option("--grid", "grid_size", type=int, default=None, help="Grid size for function algebras."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def emit_error(e: CovalgError):
    click.echo(encode_error(e).decode())


def execute(produce, options):
    """Run ``produce(opts)`` and exit with the code its report earns."""
    ctx = click.get_current_context()
    try:
        opts = RunOptions.from_config(current_app.config, **options)
        report = produce(opts)
    except CovalgError as e:
        current_app.logger.warning("%s: %s", type(e).__name__, e.message)
        emit_error(e)
        ctx.exit(EXIT_ERROR)
    click.echo(encode(report).decode())
    ctx.exit(EXIT_OK if report.passed else EXIT_FAILED)


def make_command(name):
    @covalg.command(name, help=f"Run {name} and print the report.")
    @click.option("--input", "--interaction", "-i", "input_file", type=click.File("rb"), default=None,
                  help="JSON input file ('-' for stdin).")
    @click.option("--element", "element_file", type=click.File("rb"), default=None,
                  help="JSON file with one crossed product element.")
    @click.option("--fixture", default=None, help="shift:N | trivial | ex23 instead of an input file.")
    @common_options
    def command(input_file, element_file, fixture, **options):
        def produce(opts):
            if input_file is None and fixture is None:
                raise MalformedInput("give --input or --fixture")
            doc = decode_input(input_file.read()) if input_file is not None else None
            if element_file is not None:
                doc = with_element(doc, decode_element(element_file.read()))
            pinned = {key for key, value in options.items() if value is not None}
            return run_command(name, doc, opts.with_document(doc, pinned), fixture=fixture)

        execute(produce, options)

    return command


for _name in COMMANDS:
    make_command(_name)


@covalg.command("example", help="Run one of the worked examples.")
@click.argument("name", type=click.Choice(EXAMPLES))
@click.option("--rho", type=click.Choice(RHO_CHOICES), default="half", help="Weight for ex31.")
@click.option("--n", "n", type=int, default=None, help="Degree bound for ex31, size for shift.")
@click.option("--orbit", type=click.Choice(["doubling", "tent"]), default="doubling")
@common_options
def example(name, rho, n, orbit, **options):
    execute(lambda opts: run_example(name, opts, rho=rho, n=n, orbit=orbit), options)


def run(argv=None, app=None) -> int:
    """Programmatic entry point; returns the exit code."""
    from src import create_app

    app = app or create_app()
    argv = list(sys.argv[1:] if argv is None else argv)
    with app.app_context():
        try:
            code = covalg.main(args=argv, prog_name="covalg", standalone_mode=False)
        except click.UsageError as e:
            emit_error(MalformedInput(e.format_message()))
            return EXIT_ERROR
        except click.Abort:
            return EXIT_ERROR
    return code if isinstance(code, int) else EXIT_OK


if __name__ == "__main__":
    sys.exit(run())
