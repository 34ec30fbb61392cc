"""Restricted three-body numerics."""
