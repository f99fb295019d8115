"""CLI entrypoint for the module."""
import sys
from graph_nmn.cli.main import cli_main

sys.exit(cli_main(sys.argv))
