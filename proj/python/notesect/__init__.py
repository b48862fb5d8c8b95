from _notesect import *  # noqa: F401,F403
from _notesect import __version__  # noqa: F401
