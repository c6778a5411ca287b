#!/usr/bin/env python3
"""
Development runner for ratfun.
Use this to run the command line from a checkout without installing it.
"""
import os
import sys


def main():
    # Add the project directory to the path
    project_dir = os.path.dirname(os.path.abspath(__file__))
    sys.path.insert(0, project_dir)

    # Check the runtime dependencies
    missing = []
    for module in ("pydantic", "pydantic_settings", "yaml", "cachetools"):
        try:
            __import__(module)
        except ImportError:
            missing.append(module)
    if missing:
        print(f"Error: missing modules {', '.join(missing)}. Run: pip install -r requirements.txt", file=sys.stderr)
        sys.exit(2)

    from app.main import run

    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
