from flask import Flask
from flask_cors import CORS

from app.config import Settings, configure_logging


def create_app(settings: Settings = None):
    """Create and configure the Flask application."""

    # Environment (and .env) is read once here
    settings = settings or Settings.from_env()
    configure_logging(settings.log_level)

    app = Flask(__name__)
    app.config['SECRET_KEY'] = settings.secret_key
    app.config['HRR_SETTINGS'] = settings

    # Enable CORS for all routes
    CORS(app)

    # Register blueprints
    from app.routes import main
    app.register_blueprint(main)

    # `flask --app run hrr ...` exposes the same subcommands
    from app.cli import cli
    app.cli.add_command(cli, name='hrr')

    return app
