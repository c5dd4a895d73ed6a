"""
Madelung Lab package main entry point.
This allows the package to be executed with python -m madelung_lab
"""

from .cli import main

if __name__ == "__main__":
    main()
