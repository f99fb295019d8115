"""Shared helpers: user messages and problem reporting."""
