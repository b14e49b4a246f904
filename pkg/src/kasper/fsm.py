"""Generic finite-state-machine engine.

States carry enter/exit hooks, transitions are checked against a permission
table, and any hook failure diverts the machine into its error state.
"""

from __future__ import annotations

import logging
import threading
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Hashable, Iterable, Mapping

logger = logging.getLogger(__name__)

DEFAULT_TRACE_LIMIT = 10_000


class StateId(str, Enum):
    IDLE = "Idle"
    RECOGNIZING = "Recognizing"
    BUSY = "Busy"
    ERROR = "Error"

    def __str__(self) -> str:
        return self.value


class MediaStatus(str, Enum):
    PLAYING = "Playing"
    PAUSED = "Paused"
    STOPPED = "Stopped"

    def __str__(self) -> str:
        return self.value


# -- payloads -----------------------------------------------------------------


@dataclass(frozen=True)
class TranscriptText:
    text: str

    def __post_init__(self):
        if not self.text:
            raise ValueError("TranscriptText requires non-empty text")


@dataclass(frozen=True)
class ErrorInfo:
    code: str
    message: str


@dataclass(frozen=True)
class InterruptContext:
    status: MediaStatus
    track: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "status", MediaStatus(self.status))


Payload = TranscriptText | ErrorInfo | InterruptContext | None


def payload_kind(payload: Payload) -> str:
    return "None" if payload is None else type(payload).__name__


# -- errors -------------------------------------------------------------------


class FsmError(Exception):
    pass


class UnknownInitialState(FsmError):
    pass


class TableKeyMismatch(FsmError):
    pass


class UnknownState(FsmError):
    pass


class InvalidTransition(FsmError):
    def __init__(self, src, dst):
        super().__init__(f"transition {src} -> {dst} is not permitted")
        self.src = src
        self.dst = dst


class FatalHookError(FsmError):
    """Raised when the error state itself cannot be entered or left."""


# -- table validation ---------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    state: Hashable | None = None

    def __str__(self) -> str:
        return self.rule if self.state is None else f"{self.rule}({self.state})"


def validate_table(
    table: Mapping[Hashable, Iterable[Hashable]],
    states: Iterable[Hashable] | None = None,
    *,
    error_state: Hashable = StateId.ERROR,
    idle_state: Hashable = StateId.IDLE,
) -> list[Violation]:
    """Check the error-state conventions of a transition table.

    Returns one violation per broken rule; an empty list means the table is
    well formed. ``states`` defaults to the table's own keys.
    """
    violations: list[Violation] = []
    keys = set(table)
    states = set(keys if states is None else states)
    for s in sorted(states - keys, key=str):
        violations.append(Violation("MissingKey", s))
    for s in sorted(keys - states, key=str):
        violations.append(Violation("UnknownKey", s))
    for src in sorted(keys, key=str):
        for dst in sorted(set(table[src]) - states, key=str):
            violations.append(Violation("UnknownTarget", dst))
    if error_state not in keys:
        violations.append(Violation("MissingErrorState", error_state))
        return violations
    for s in sorted(keys, key=str):
        if s != error_state and error_state not in table[s]:
            violations.append(Violation("MissingErrorEdge", s))
    if set(table[error_state]) != {idle_state}:
        violations.append(Violation("ErrorMustOnlyGoIdle"))
    return violations


# -- machine ------------------------------------------------------------------


@dataclass(frozen=True)
class TraceRecord:
    src: Hashable
    dst: Hashable
    kind: str

    def __str__(self) -> str:
        return f"{self.src} -> {self.dst} [{self.kind}]"


EnterHook = Callable[["Machine", Payload], Any]
ExitHook = Callable[["Machine"], Any]


class Machine:
    """A finite state machine with a permission table and per-state hooks.

    Hooks run in the order ``exit(old)``, then ``current`` is updated, then
    ``enter(new, payload)``. An exception raised by any hook sends the machine
    to ``error_state`` with an :class:`ErrorInfo` payload.
    """

    def __init__(
        self,
        states: Iterable[Hashable],
        table: Mapping[Hashable, Iterable[Hashable]],
        initial: Hashable,
        *,
        error_state: Hashable = StateId.ERROR,
        trace_limit: int = DEFAULT_TRACE_LIMIT,
    ):
        states = frozenset(states)
        if initial not in states:
            raise UnknownInitialState(f"initial state {initial!r} not in {sorted(map(str, states))}")
        if set(table) != states:
            raise TableKeyMismatch(
                f"table keys {sorted(map(str, table))} differ from states {sorted(map(str, states))}"
            )
        self.states = states
        self.table = {s: frozenset(table[s]) for s in table}
        self.initial = initial
        self.error_state = error_state
        self._current = initial
        self._trace: deque[TraceRecord] = deque(maxlen=trace_limit)
        self._enter: dict[Hashable, list[EnterHook]] = {s: [] for s in states}
        self._exit: dict[Hashable, list[ExitHook]] = {s: [] for s in states}
        self._lock = threading.Lock()

    @property
    def current(self) -> Hashable:
        return self._current

    @property
    def trace(self) -> tuple[TraceRecord, ...]:
        with self._lock:
            return tuple(self._trace)

    def snapshot(self) -> tuple[Hashable, tuple[TraceRecord, ...]]:
        with self._lock:
            return self._current, tuple(self._trace)

    def on_enter(self, state: Hashable, hook: EnterHook) -> None:
        self._check_known(state)
        self._enter[state].append(hook)

    def on_exit(self, state: Hashable, hook: ExitHook) -> None:
        self._check_known(state)
        self._exit[state].append(hook)

    def can_transition(self, target: Hashable) -> bool:
        return target in self.table[self._current]

    def start(self, payload: Payload = None) -> None:
        """Run the enter hooks of the initial state (no trace record)."""
        exc = self._run_enter(self._current, payload)
        if exc is not None:
            if self._current == self.error_state:
                raise FatalHookError(f"enter hook of {self._current} failed: {exc}") from exc
            self._fail(self._current, exc, exit_done=False)

    def transition(self, target: Hashable, payload: Payload = None) -> Hashable:
        self._check_known(target)
        if target not in self.table[self._current]:
            raise InvalidTransition(self._current, target)

        src = self._current
        exc = self._run_exit(src)
        if exc is not None:
            if src == self.error_state:
                raise FatalHookError(f"exit hook of {src} failed: {exc}") from exc
            return self._fail(src, exc, exit_done=True)

        self._commit(src, target, payload)
        exc = self._run_enter(target, payload)
        if exc is not None:
            if target == self.error_state:
                raise FatalHookError(f"enter hook of {target} failed: {exc}") from exc
            return self._fail(target, exc, exit_done=False)
        return self._current

    def _fail(self, where: Hashable, exc: BaseException, *, exit_done: bool) -> Hashable:
        logger.warning("hook failure in %s: %s", where, exc)
        info = ErrorInfo("hook_failure", f"{where}: {exc}")
        if not exit_done:
            inner = self._run_exit(where)
            if inner is not None:
                logger.warning("exit hook of %s also failed: %s", where, inner)
        self._commit(where, self.error_state, info)
        inner = self._run_enter(self.error_state, info)
        if inner is not None:
            raise FatalHookError(f"enter hook of {self.error_state} failed: {inner}") from inner
        return self._current

    def _commit(self, src: Hashable, dst: Hashable, payload: Payload) -> None:
        with self._lock:
            self._current = dst
            self._trace.append(TraceRecord(src, dst, payload_kind(payload)))

    def _run_enter(self, state: Hashable, payload: Payload) -> BaseException | None:
        for hook in self._enter[state]:
            try:
                hook(self, payload)
            except Exception as e:  # noqa: BLE001 - any hook error is routed to the error state
                return e
        return None

    def _run_exit(self, state: Hashable) -> BaseException | None:
        for hook in self._exit[state]:
            try:
                hook(self)
            except Exception as e:  # noqa: BLE001
                return e
        return None

    def _check_known(self, state: Hashable) -> None:
        if state not in self.table:
            raise UnknownState(f"unknown state {state!r}")


def build_machine(
    states: Iterable[Hashable],
    table: Mapping[Hashable, Iterable[Hashable]],
    initial: Hashable,
    **kwargs,
) -> Machine:
    return Machine(states, table, initial, **kwargs)


def replay(trace: Iterable[TraceRecord], states, table, initial) -> Machine:
    """Rebuild a hook-less machine by re-applying the transitions of ``trace``.

    Payload kinds are preserved through placeholder payloads so the replayed
    trace compares equal to the original.
    """
    trace = list(trace)
    start = trace[0].src if trace else initial
    m = Machine(states, table, start, trace_limit=max(len(trace), 1))
    for rec in trace:
        if rec.src != m.current:
            raise InvalidTransition(m.current, rec.dst)
        m.transition(rec.dst, _placeholder(rec.kind))
    return m


def _placeholder(kind: str) -> Payload:
    if kind == "TranscriptText":
        return TranscriptText("<replay>")
    if kind == "ErrorInfo":
        return ErrorInfo("replay", "")
    if kind == "InterruptContext":
        return InterruptContext(MediaStatus.STOPPED)
    return None
