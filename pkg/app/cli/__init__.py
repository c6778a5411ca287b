"""Command-line front end."""
from app.cli.commands import CommandResult, router

__all__ = ["CommandResult", "router"]
