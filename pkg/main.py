#!/usr/bin/env python3
"""
Energy-capped multiple-access channel simulator.
Runs routing algorithms against leaky-bucket adversaries on a shared channel
where at most k stations may be switched on per round.

Usage:
  python main.py run scenario.json            # Run one scenario, print or write its summary
  python main.py sweep scenario.json --jobs 4 # Run a scenario once per rho in its sweep list
  python main.py layout k-cycle --n 7 --k 3   # Print the group layout
  python main.py witness k-cycle --n 7 --k 3 --rho 1/2 --t 7000
  python main.py validate-trace trace.csv --rho 1/2 --beta 2
"""

import sys

from macsim.engine.cli import main

if __name__ == "__main__":
    sys.exit(main())
