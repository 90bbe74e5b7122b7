"""Command-line harness."""

from noisyqpu.cli.main import main

__all__ = ["main"]
