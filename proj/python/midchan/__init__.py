# SPDX-License-Identifier: Apache-2.0
"""Mid-band indoor radio channel toolkit."""

from ._midchan import *  # noqa: F401,F403
from ._midchan import ValidationError, ComputationError  # noqa: F401

__version__ = "0.1.0"
