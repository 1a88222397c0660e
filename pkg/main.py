import sys
import logging

from cli import main

logger = logging.getLogger(__name__)


def run() -> None:
    """Console entry point for ``qmock``."""
    try:
        exit_code = main(configure_logging=True)
    except KeyboardInterrupt:
        print("\nReceived keyboard interrupt, shutting down...")
        exit_code = 130
    except Exception as e:
        logger.exception(f"Fatal error: {e}")
        print(f"Fatal error: {e}", file=sys.stderr)
        exit_code = 1
    sys.exit(exit_code)


if __name__ == "__main__":
    run()
