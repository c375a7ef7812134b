"""Command-line front end of orbitsieve."""
