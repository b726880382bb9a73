# src/routes/api.py
from flask import Blueprint, current_app, request

from src.exceptions import MalformedInput
from src.schemas.payloads import decode_input, encode
from src.services.runner import COMMANDS, RunOptions, run_command, run_example

api_bp = Blueprint("api", __name__, url_prefix="/api")


def options_from_request() -> RunOptions:
    """Config defaults overridden by the query string."""
    args = request.args
    try:
        return RunOptions.from_config(
            current_app.config,
            tol=args.get("tol", type=float),
            seed=args.get("seed", type=int),
            samples=args.get("samples", type=int),
            x_max=args.get("x_max", type=int),
            max_k=args.get("max_k", type=int),
            window=args.get("window", type=int),
            grid_size=args.get("grid", type=int),
        )
    except (TypeError, ValueError) as e:
        raise MalformedInput(str(e)) from e


def json_response(report):
    return current_app.response_class(encode(report), mimetype="application/json")


@api_bp.route("/<command>", methods=["POST"])
def run(command):
    if command not in COMMANDS:
        raise MalformedInput(f"unknown command {command!r}")
    fixture = request.args.get("fixture")
    body = request.get_data()
    doc = decode_input(body) if body else None
    opts = options_from_request().with_document(doc, pinned=request.args)
    report = run_command(command, doc, opts, fixture=fixture)
    current_app.logger.info("api %s passed=%s", command, report.passed)
    return json_response(report)


@api_bp.route("/example/<name>", methods=["GET"])
def example(name):
    report = run_example(
        name,
        options_from_request(),
        rho=request.args.get("rho", "half"),
        n=request.args.get("n", type=int),
        orbit=request.args.get("orbit", "doubling"),
    )
    return json_response(report)
