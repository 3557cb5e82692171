"""Python access to the counter-narrative evaluation core."""

from ._cneval import *  # noqa: F401,F403
from ._cneval import InputError, ScoreParseError, UndefinedStatistic  # noqa: F401
