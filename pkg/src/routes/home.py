# src/routes/home.py
from flask import Blueprint, current_app, jsonify

from src.services.corpus import EXAMPLES
from src.services.runner import COMMANDS

home_bp = Blueprint("home", __name__)


@home_bp.route("/health")
def health():
    return "OK", 200


@home_bp.route("/")
@home_bp.route("/index")
def index():
    return jsonify(
        {
            "name": current_app.config["APP_NAME"],
            "schema_version": current_app.config["SCHEMA_VERSION"],
            "commands": sorted(COMMANDS),
            "examples": list(EXAMPLES),
        }
    )
