"""Common utilities for the gossip flooding package."""
