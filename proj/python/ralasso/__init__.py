"""Penalized robust regression, truncated means, and simulation tooling."""

try:
    from ralasso._ralasso import *  # noqa: F401,F403  (installed layout)
    from ralasso._ralasso import __version__  # noqa: F401
except ImportError:  # development layout: extension sits on sys.path directly
    from _ralasso import *  # noqa: F401,F403
    from _ralasso import __version__  # noqa: F401
