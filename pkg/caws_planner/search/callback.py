#!/usr/bin/env python3
# Copyright (C) 2025 CAWS Planner Contributors
# Licensed under AGPL-3.0

"""
Search progress callbacks.

The planner calls these synchronously; implementations must not raise.
"""

from typing import Protocol


class SearchCallback(Protocol):
    """Progress hooks of the Hybrid-A* planner."""

    def on_expand(self, expanded: int, g: float, h: float, open_size: int) -> None:
        """
        Called after a node is expanded.

        Args:
            expanded: Nodes expanded so far
            g: Cost-to-come of the expanded node (s)
            h: Heuristic of the expanded node (s)
            open_size: Entries left in the open list
        """
        ...

    def on_goal(self, expanded: int, total_time: float, via_shot: bool) -> None:
        """
        Called once when the goal is reached.

        Args:
            expanded: Nodes expanded
            total_time: Duration of the found trajectory (s)
            via_shot: True if the final leg came from the analytic goal shot
        """
        ...

    def on_error(self, error: str) -> None:
        ...


class NoOpCallback:
    """Callback that ignores everything."""

    def on_expand(self, expanded: int, g: float, h: float, open_size: int) -> None:
        pass

    def on_goal(self, expanded: int, total_time: float, via_shot: bool) -> None:
        pass

    def on_error(self, error: str) -> None:
        pass
