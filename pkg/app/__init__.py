import logging
from dotenv import load_dotenv
from flask import Flask, jsonify
from flask_limiter import Limiter
from flask_limiter.util import get_remote_address
from .config import Config
from .errors import ClonerError, DiscrepancyError, DomainError, ResourceError

load_dotenv()
limiter = Limiter(key_func=get_remote_address)


def create_app(config_class=Config):
    app = Flask(__name__)
    app.config.from_object(config_class)
    logging.basicConfig(
        level=app.config["LOG_LEVEL"],
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger("app").setLevel(app.config["LOG_LEVEL"])
    # Initialize extensions
    limiter.init_app(app)
    # Register blueprints
    from .routes.api import api_bp
    from .routes.commands import commands_bp

    app.register_blueprint(api_bp, url_prefix="/api")
    app.register_blueprint(commands_bp)

    # Error handlers
    @app.errorhandler(DomainError)
    def domain_error(error):
        return jsonify({"error": "domain_error", "message": str(error)}), 400

    @app.errorhandler(ResourceError)
    def resource_error(error):
        return jsonify({"error": "resource_limit", "message": str(error)}), 413

    @app.errorhandler(DiscrepancyError)
    def discrepancy_error(error):
        app.logger.error(f"Discrepancy: {error}")
        body = {
            "error": "discrepancy",
            "message": str(error),
            "deviation": error.deviation,
            "tolerance": error.tolerance,
        }
        return jsonify(body), 500

    @app.errorhandler(ClonerError)
    def cloner_error(error):
        app.logger.error(f"Unhandled toolkit error: {error}")
        return jsonify({"error": "internal", "message": str(error)}), 500

    @app.errorhandler(404)
    def not_found_error(error):
        return jsonify({"error": "not_found", "message": "no such endpoint"}), 404

    @app.errorhandler(429)
    def rate_limited(error):
        return jsonify({"error": "rate_limited", "message": str(error.description)}), 429

    return app
