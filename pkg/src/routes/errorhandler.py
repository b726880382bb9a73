# src/routes/errorhandler.py
from flask import current_app, jsonify
from werkzeug.exceptions import HTTPException

from src.exceptions import CovalgError, MalformedInput
from src.schemas.payloads import encode_error


def register_error_handlers(app):
    """Register error handlers with the app."""

    @app.errorhandler(CovalgError)
    def handle_domain_error(e):
        status = 400 if isinstance(e, MalformedInput) else 422
        current_app.logger.warning("%s: %s", type(e).__name__, e.message)
        return current_app.response_class(encode_error(e), status=status, mimetype="application/json")

    @app.errorhandler(Exception)
    def handle_exception(e):
        # pass through HTTP errors
        if isinstance(e, HTTPException):
            return jsonify({"error": {"type": e.name, "message": e.description}}), e.code

        # now you're handling non-HTTP exceptions only
        current_app.logger.exception("unhandled error")
        return jsonify({"error": {"type": type(e).__name__, "message": str(e)}}), 500
