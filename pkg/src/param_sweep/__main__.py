"""
Entry point for ``python -m param_sweep``.
"""

from .cli import main

if __name__ == "__main__":
    main()
