#!/usr/bin/env python3
"""
BREA simulator - Main entry point.

This script provides a convenient way to run the BREA CLI.
"""

from src.cli import main

if __name__ == "__main__":
    main()
