#!/usr/bin/env python3
"""
Simple entry point script for predens.

This allows running the CLI as: python cli.py risk-curve --config experiment.toml
"""

from predens.cli import main

if __name__ == "__main__":
    main()
