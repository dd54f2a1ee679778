from flask.cli import FlaskGroup
from app import create_app

cli = FlaskGroup(create_app=create_app, help="Economical phase-covariant qudit cloning toolkit.")

if __name__ == "__main__":
    cli()
