"""Entry point for the Boussinesq long-time asymptotics toolkit."""

from __future__ import annotations

import logging
import sys
from typing import Optional

from boussinesq_asymptotics.cli import main as cli_main

logging.basicConfig(
    level=logging.INFO,
    format="[%(asctime)s] %(levelname)s - %(name)s - %(message)s",
    datefmt="%H:%M:%S",
)
logger = logging.getLogger(__name__)


def main(argv: Optional[list[str]] = None) -> int:
    """Dispatch to the requested subcommand and return its exit code."""
    logger.info("Starting Boussinesq asymptotics...")
    return cli_main(argv)


if __name__ == "__main__":
    sys.exit(main())
