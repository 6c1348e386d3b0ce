"""Combinatorial group theory workbench: free groups, Stallings graphs, graphs of groups."""

__version__ = "0.1.0"
