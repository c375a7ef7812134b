"""Main entry point for the thin orbit sieve CLI."""

from app.cmd import cli

if __name__ == "__main__":
    cli()
