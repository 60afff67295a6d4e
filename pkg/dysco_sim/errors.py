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
"""Exceptions and error policies shared across the simulator."""

import enum
import functools
import logging
from typing import Any, Callable, Optional, Sequence, TypeVar

T = TypeVar('T')


class Error(Exception):
    """Base class for errors raised by this package."""


class InvalidArgumentError(Error, ValueError):
    """An argument is outside the domain of an operation."""


class InvalidProgramError(Error):
    """A pulse program violates one or more invariants.

    Attributes:
        violations: Every violation that was found, in a stable order.
    """

    def __init__(self, violations: Sequence[str]) -> None:
        super().__init__('; '.join(violations))
        self.violations = tuple(violations)


class BandwidthError(InvalidArgumentError):
    """A modulation frequency is outside the admitted bandwidth."""


class SamplingError(Error):
    """A series is not sampled the way an analysis requires."""


class NoComponentError(Error):
    """A spectrum has no component above the detection threshold."""


class SlopeError(Error):
    """A response is too flat to estimate its slope."""


class GridCoverageError(Error):
    """A frequency grid does not cover the support of a noise spectrum."""


class ErrorPolicy(enum.Enum):
    """What an analysis step should do when it can't produce a value.

    Attributes:
        RETURN_NONE: Log the error and return None.
        RAISE: Raise the underlying error.
        DEFAULT: Default policy if none is specified, RETURN_NONE.
    """
    RETURN_NONE = enum.auto()
    RAISE = enum.auto()
    DEFAULT = RETURN_NONE


def handle_error_policy(
        function: Callable[..., T]) -> Callable[..., Optional[T]]:
    """Applies the error_policy keyword argument of an analysis step.

    The wrapped function always runs under ErrorPolicy.RAISE. Under
    RETURN_NONE the wrapper turns its Error into a warning naming the step, so
    sweeps with many empty rows log one line per row rather than a traceback.
    """

    # TODO(https://github.com/google/yapf/issues/793): Remove yapf disable.
    @functools.wraps(function)
    def _wrapper(
            *args: Any,
            error_policy: ErrorPolicy = ErrorPolicy.DEFAULT,
            **kwargs: Any,
    ) -> Optional[T]:  # yapf: disable
        try:
            return function(*args, error_policy=ErrorPolicy.RAISE, **kwargs)
        except Error as error:
            if error_policy is not ErrorPolicy.RETURN_NONE:
                raise
            logging.warning('%s returned None: %s', function.__name__, error)
            return None

    return _wrapper
