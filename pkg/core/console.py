"""
Console
-------
ANSI colour helpers for CLI output.

Colour is dropped when stdout is not a terminal or NO_COLOR is set, so
redirected output and test captures stay plain.
"""

import os
import sys


class Colors:
    """ANSI color codes for terminal output."""
    RESET = "\033[0m"
    BOLD = "\033[1m"
    DIM = "\033[2m"

    RED = "\033[31m"
    GREEN = "\033[32m"
    YELLOW = "\033[33m"
    CYAN = "\033[36m"


def color_enabled(stream=None) -> bool:
    stream = stream or sys.stdout
    if os.environ.get("NO_COLOR"):
        return False
    return hasattr(stream, "isatty") and stream.isatty()


def colored(text: str, color: str) -> str:
    """Apply color to text when the terminal supports it."""
    if not color_enabled():
        return text
    return f"{color}{text}{Colors.RESET}"


def success(text: str) -> str:
    return colored(f"✓ {text}", Colors.GREEN)


def error(text: str) -> str:
    return colored(f"✗ {text}", Colors.RED)


def warning(text: str) -> str:
    return colored(f"⚠ {text}", Colors.YELLOW)


def info(text: str) -> str:
    return colored(f"ℹ {text}", Colors.CYAN)


def stability_color(real_part: float) -> str:
    """Green for a decaying mode, red for a growing one."""
    return Colors.GREEN if real_part < 0.0 else Colors.RED


def format_real_part(real_part: float) -> str:
    return colored(f"{real_part:+.6f}", stability_color(real_part))
