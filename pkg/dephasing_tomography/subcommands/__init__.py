"""
Subcommands package for the Dephasing Tomography CLI.
Each module defines COMMAND_NAME, register_subcommand and main.
"""
