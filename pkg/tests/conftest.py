"""Test-session defaults: single-threaded solver for reproducible output."""

import os

os.environ.setdefault("ANHARMONIC_THREADS", "1")
