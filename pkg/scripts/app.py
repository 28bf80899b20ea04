"""
Main application entry point for the bubble-tower toolkit

Usage: Run from project root directory
    python scripts/app.py constants --N 5 --csv constants.csv
    python scripts/app.py critical-point --N 5 --k 2
    python scripts/app.py campaign
"""

import os
import sys

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from src.cli import main


if __name__ == "__main__":
    sys.exit(main())
