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
"""Progress reporting for long sweeps over a publish-subscribe bus."""

import dataclasses
import logging
import queue
import threading
from typing import Callable, List, NoReturn, Optional, Tuple, Type, Union


@dataclasses.dataclass(frozen=True)
class Message:
    """Base class for progress messages.

    Messages are shared across threads and subscribers, so they must be
    immutable.
    """


@dataclasses.dataclass(frozen=True)
class SweepStarted(Message):
    """A sweep has been scheduled.

    Attributes:
        experiment: Name of the experiment, e.g. 'spectrogram'.
        cells: Number of independent cells in the sweep.
    """
    experiment: str
    cells: int


@dataclasses.dataclass(frozen=True)
class CellFinished(Message):
    """One cell of a sweep is done.

    Attributes:
        experiment: Name of the experiment.
        index: Index of the cell within the sweep.
        completed: Number of cells done so far, including this one.
        cells: Number of cells in the sweep.
    """
    experiment: str
    index: int
    completed: int
    cells: int


@dataclasses.dataclass(frozen=True)
class SweepFinished(Message):
    """Every cell of a sweep is done.

    Attributes:
        experiment: Name of the experiment.
        cells: Number of cells in the sweep.
    """
    experiment: str
    cells: int


MessageTypes = Union[Type[Message], Tuple[Type[Message], ...]]


@dataclasses.dataclass(frozen=True)
class _Subscription:
    message_types: MessageTypes
    callback: Callable[[Message], None]
    inbox: 'queue.Queue[Message]' = dataclasses.field(
        default_factory=queue.Queue)


def _deliver(subscription: _Subscription) -> NoReturn:
    while True:
        message = subscription.inbox.get()
        try:
            subscription.callback(message)
        except Exception:  # pylint: disable=broad-except
            logging.exception('Progress subscriber %r failed on %r',
                              subscription.callback, message)
        finally:
            subscription.inbox.task_done()


class ProgressBus:
    """Delivers progress messages off the threads that run sweep cells.

    A subscription receives every message that is an instance of one of its
    types, in publishing order, on a daemon thread of its own. Callbacks
    never slow down or abort a sweep; their exceptions are logged.
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._subscriptions: List[_Subscription] = []

    def join(self) -> None:
        """Waits until every published message has been delivered."""
        with self._lock:
            subscriptions = tuple(self._subscriptions)
        for subscription in subscriptions:
            subscription.inbox.join()

    def publish(self, message: Message) -> None:
        with self._lock:
            for subscription in self._subscriptions:
                if isinstance(message, subscription.message_types):
                    subscription.inbox.put(message)

    def subscribe(self, message_types: MessageTypes,
                  callback: Callable[[Message], None]) -> None:
        """Subscribes to one message type, or a tuple of them.

        Messages of all the types arrive in a single ordered stream, so one
        subscription sees a sweep start before its cells finish.
        """
        subscription = _Subscription(message_types, callback)
        threading.Thread(target=_deliver, args=(subscription,),
                         daemon=True).start()
        with self._lock:
            self._subscriptions.append(subscription)


class Tracker:
    """Publishes the progress of one sweep, from any number of threads."""

    def __init__(self, bus: Optional[ProgressBus], experiment: str,
                 cells: int) -> None:
        self._bus = bus
        self._experiment = experiment
        self._cells = cells
        self._completed = 0
        self._lock = threading.Lock()
        if bus is not None:
            bus.publish(SweepStarted(experiment, cells))

    def cell_finished(self, index: int) -> None:
        with self._lock:
            self._completed += 1
            completed = self._completed
        if self._bus is not None:
            self._bus.publish(
                CellFinished(self._experiment, index, completed, self._cells))

    def finish(self) -> None:
        if self._bus is not None:
            self._bus.publish(SweepFinished(self._experiment, self._cells))


def _log(message: Message) -> None:
    if isinstance(message, SweepStarted):
        logging.info('Starting %s with %d cells.', message.experiment,
                     message.cells)
    elif isinstance(message, CellFinished):
        logging.info('%s: %d/%d cells done.', message.experiment,
                     message.completed, message.cells)
    elif isinstance(message, SweepFinished):
        logging.info('Finished %s.', message.experiment)


def log_progress(bus: ProgressBus) -> None:
    """Logs every progress message at INFO level, in publishing order."""
    bus.subscribe((SweepStarted, CellFinished, SweepFinished), _log)
