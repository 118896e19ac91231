"""
Hypergeometric Solver
Finds solutions exp(int r)*2F1(a1, a2; b1; f) of second order linear
differential operators with rational function coefficients.

Usage: python main.py solve "<operator>" [options]
       python main.py batch <file> [options]
"""
import sys

from cli.commands import main
from utils.logger import setup_logger

logger = setup_logger(__name__)


if __name__ == "__main__":
    logger.info("=" * 60)
    logger.info("Hypergeometric Solver Starting...")
    logger.info("=" * 60)

    sys.exit(main())
