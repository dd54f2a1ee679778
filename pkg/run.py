import os
from app import create_app

# Development server for the JSON API; the CLI commands run through `python -m app`.
app = create_app()

if __name__ == "__main__":
    app.run(host=os.getenv("CLONER_HOST", "127.0.0.1"), port=int(os.getenv("CLONER_PORT", 5000)))
