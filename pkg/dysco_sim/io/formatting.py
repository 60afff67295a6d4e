# Copyright 2020 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Text formatting of table values."""

import enum
import math
from typing import Any

import numpy as np


def format_float(value: float) -> str:
    """Returns a float with 17 significant digits, which round-trips exactly."""
    value = float(value)
    if math.isnan(value):
        return 'nan'
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return '%.17g' % value


def format_value(value: Any) -> str:
    """Returns a table cell or metadata value as text.

    Floats use format_float(); sequences are comma separated.
    """
    if isinstance(value, enum.Enum):
        return format_value(value.value)
    if isinstance(value, (bool, np.bool_)):
        return 'true' if value else 'false'
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if isinstance(value, (tuple, list, np.ndarray)):
        return ','.join(format_value(item) for item in value)
    return str(value)
