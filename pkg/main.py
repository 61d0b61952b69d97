import logging
import sys

from src.settings import LOG_FORMAT, LOG_LEVEL

# --- Main execution block ---
if __name__ == "__main__":
    # 1. Configure console logging once; --verbose lowers the level to DEBUG later.
    logging.basicConfig(level=LOG_LEVEL, format=LOG_FORMAT)

    # 2. Import the command-line front-end after logging is set up.
    from src.cli.cli_commands import main

    # 3. Run the requested command and hand its exit code to the shell
    #    (0 ok, 1 numeric failure, 2 DMRG not converged, 64 usage error).
    sys.exit(main(sys.argv[1:]))
