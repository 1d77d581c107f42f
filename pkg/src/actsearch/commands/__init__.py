"""Command modules for the actsearch CLI."""
