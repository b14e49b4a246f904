"""Kasper's assistant state machine: event dispatch over Idle/Recognizing/Busy/Error.

A second hotword detector runs while Busy. When it fires, the in-flight
response is abandoned, playing media is paused, and the machine goes back to
Recognizing; media resumes once the interrupting query has been answered.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from kasper.fsm import (
    ErrorInfo,
    InterruptContext,
    Machine,
    MediaStatus,
    StateId,
    TranscriptText,
)

logger = logging.getLogger(__name__)

ERROR_TEMPLATE = "Sorry, something went wrong: {message}"


class EventKind(str, Enum):
    HOTWORD_DETECTED = "HotwordDetected"
    WAKE_BUTTON_PRESSED = "WakeButtonPressed"
    TRANSCRIPT_READY = "TranscriptReady"
    RECOGNITION_FAILED = "RecognitionFailed"
    RESPONSE_READY = "ResponseReady"
    RESPONSE_SPOKEN = "ResponseSpoken"
    QUERY_FAILED = "QueryFailed"
    ERROR_ANNOUNCED = "ErrorAnnounced"
    MEDIA_COMMAND = "MediaCommand"

    def __str__(self) -> str:
        return self.value


MEDIA_COMMANDS = ("play", "pause", "stop")


@dataclass(frozen=True)
class Event:
    kind: EventKind
    timestamp: int = 0
    text: str | None = None
    message: str | None = None
    intent: str | None = None
    command: str | None = None
    track: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", EventKind(self.kind))
        if self.timestamp < 0:
            raise ValueError(f"negative timestamp {self.timestamp}")
        if self.kind is EventKind.TRANSCRIPT_READY and not self.text:
            raise ValueError("TranscriptReady requires non-empty text")
        if self.kind is EventKind.MEDIA_COMMAND:
            if self.command not in MEDIA_COMMANDS:
                raise ValueError(f"unknown media command {self.command!r}")
            if self.command == "play" and not self.track:
                raise ValueError("MediaCommand play requires a track id")

    def args(self) -> list[str]:
        """Positional arguments in scenario-file order."""
        k = self.kind
        if k is EventKind.TRANSCRIPT_READY:
            return [self.text]
        if k in (EventKind.RECOGNITION_FAILED, EventKind.QUERY_FAILED):
            return [self.message] if self.message is not None else []
        if k is EventKind.RESPONSE_READY:
            if self.text is None:
                return []
            return [self.intent or "", self.text]
        if k is EventKind.MEDIA_COMMAND:
            return [self.command] + ([self.track] if self.track else [])
        return []


class ActionKind(str, Enum):
    START_RECOGNIZER = "StartRecognizer"
    STOP_RECOGNIZER = "StopRecognizer"
    START_BUSY_HOTWORD_DETECTOR = "StartBusyHotwordDetector"
    STOP_BUSY_HOTWORD_DETECTOR = "StopBusyHotwordDetector"
    CALL_BRAIN = "CallBrain"
    SPEAK = "Speak"
    PAUSE_MEDIA = "PauseMedia"
    RESUME_MEDIA = "ResumeMedia"
    PLAY_MEDIA = "PlayMedia"
    STOP_MEDIA = "StopMedia"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    arg: str | None = None

    def __str__(self) -> str:
        if self.arg is None:
            return self.kind.value
        if self.kind is ActionKind.PLAY_MEDIA:
            return f"{self.kind.value}({self.arg})"
        return f"{self.kind.value}({json.dumps(self.arg, ensure_ascii=False)})"


@dataclass
class MediaSession:
    status: MediaStatus = MediaStatus.STOPPED
    track: str | None = None

    def check(self) -> list[str]:
        if self.status is MediaStatus.STOPPED and self.track is not None:
            return ["media stopped but track is set"]
        if self.status is not MediaStatus.STOPPED and self.track is None:
            return [f"media {self.status} without a track"]
        return []


class NotBusy(Exception):
    pass


def kasper_table() -> dict[StateId, frozenset[StateId]]:
    S = StateId
    return {
        S.IDLE: frozenset({S.RECOGNIZING, S.ERROR}),
        S.RECOGNIZING: frozenset({S.BUSY, S.IDLE, S.ERROR}),
        # Busy -> Recognizing is the interrupt edge of the modified machine.
        S.BUSY: frozenset({S.IDLE, S.RECOGNIZING, S.ERROR}),
        S.ERROR: frozenset({S.IDLE}),
    }


@dataclass
class AssistantContext:
    machine: Machine
    media: MediaSession = field(default_factory=MediaSession)
    interrupts: list[InterruptContext] = field(default_factory=list)
    spoken: list[str] = field(default_factory=list)
    brain: Any = None
    user_paused: bool = False
    _outbox: list[Action] = field(default_factory=list, repr=False)

    @property
    def state(self) -> StateId:
        return self.machine.current

    def emit(self, kind: ActionKind, arg: str | None = None) -> None:
        self._outbox.append(Action(kind, arg))

    def take_actions(self) -> list[Action]:
        out, self._outbox = self._outbox, []
        return out


def new_context(brain=None, *, trace_limit: int = 10_000) -> AssistantContext:
    """Build a fresh assistant in Idle with all state hooks wired."""
    machine = Machine(list(StateId), kasper_table(), StateId.IDLE, trace_limit=trace_limit)
    ctx = AssistantContext(machine=machine, brain=brain)
    S = StateId

    def enter_recognizing(m, payload):
        ctx.emit(ActionKind.START_RECOGNIZER)

    def exit_recognizing(m):
        ctx.emit(ActionKind.STOP_RECOGNIZER)

    def enter_busy(m, payload):
        if isinstance(payload, TranscriptText):
            ctx.emit(ActionKind.CALL_BRAIN, payload.text)
        # the second detector is (re)started on every entry into Busy
        ctx.emit(ActionKind.START_BUSY_HOTWORD_DETECTOR)

    def exit_busy(m):
        ctx.emit(ActionKind.STOP_BUSY_HOTWORD_DETECTOR)

    def enter_error(m, payload):
        message = payload.message if isinstance(payload, ErrorInfo) else "unknown error"
        _speak(ctx, ERROR_TEMPLATE.format(message=message))

    def enter_idle(m, payload):
        _drain_interrupts(ctx)

    machine.on_enter(S.RECOGNIZING, enter_recognizing)
    machine.on_exit(S.RECOGNIZING, exit_recognizing)
    machine.on_enter(S.BUSY, enter_busy)
    machine.on_exit(S.BUSY, exit_busy)
    machine.on_enter(S.ERROR, enter_error)
    machine.on_enter(S.IDLE, enter_idle)
    return ctx


def _speak(ctx: AssistantContext, text: str) -> None:
    ctx.spoken.append(text)
    ctx.emit(ActionKind.SPEAK, text)


def _drain_interrupts(ctx: AssistantContext) -> None:
    # Back in Idle no query is in flight, so every pending interrupt resolves
    # here. Only the outermost interrupt can have paused playing media.
    saved = ctx.interrupts
    ctx.interrupts = []
    playing = next((ic for ic in saved if ic.status is MediaStatus.PLAYING), None)
    if playing is not None and ctx.media.status is MediaStatus.PAUSED:
        ctx.media = MediaSession(MediaStatus.PLAYING, playing.track)
        ctx.emit(ActionKind.RESUME_MEDIA)


def interrupt_busy(ctx: AssistantContext) -> list[Action]:
    """Handle a hotword heard by the Busy-state detector."""
    if ctx.state is not StateId.BUSY:
        raise NotBusy(f"interrupt requires Busy, machine is {ctx.state}")
    ic = InterruptContext(ctx.media.status, ctx.media.track)
    ctx.interrupts.append(ic)
    if ctx.media.status is MediaStatus.PLAYING:
        ctx.media = MediaSession(MediaStatus.PAUSED, ctx.media.track)
        ctx.user_paused = False
        ctx.emit(ActionKind.PAUSE_MEDIA)
    ctx.machine.transition(StateId.RECOGNIZING, ic)
    return ctx.take_actions()


def _media_command(ctx: AssistantContext, ev: Event) -> None:
    media = ctx.media
    if ev.command == "play":
        ctx.media = MediaSession(MediaStatus.PLAYING, ev.track)
        ctx.user_paused = False
        ctx.emit(ActionKind.PLAY_MEDIA, ev.track)
    elif ev.command == "pause":
        if media.status is not MediaStatus.PLAYING:
            logger.warning("pause ignored: media is %s", media.status)
            return
        ctx.media = MediaSession(MediaStatus.PAUSED, media.track)
        ctx.user_paused = True
        ctx.emit(ActionKind.PAUSE_MEDIA)
    else:
        if media.status is MediaStatus.STOPPED:
            logger.warning("stop ignored: media already stopped")
            return
        ctx.media = MediaSession()
        ctx.user_paused = False
        ctx.emit(ActionKind.STOP_MEDIA)
    # an explicit user command supersedes whatever an interrupt saved
    ctx.interrupts = [InterruptContext(MediaStatus.STOPPED) for _ in ctx.interrupts]


def handle_event(ctx: AssistantContext, ev: Event) -> list[Action]:
    """Dispatch one event; mutates ``ctx`` and returns the emitted actions in order."""
    S, K = StateId, EventKind
    state = ctx.state
    ctx.take_actions()

    if ev.kind is K.MEDIA_COMMAND:
        if state in (S.IDLE, S.BUSY):
            _media_command(ctx, ev)
        else:
            logger.warning("MediaCommand ignored in %s", state)
    elif state is S.IDLE and ev.kind in (K.HOTWORD_DETECTED, K.WAKE_BUTTON_PRESSED):
        ctx.machine.transition(S.RECOGNIZING)
    elif state is S.RECOGNIZING and ev.kind is K.TRANSCRIPT_READY:
        ctx.machine.transition(S.BUSY, TranscriptText(ev.text))
    elif state is S.RECOGNIZING and ev.kind is K.RECOGNITION_FAILED:
        ctx.machine.transition(S.ERROR, ErrorInfo("recognition_failed", ev.message or "recognition failed"))
    elif state is S.BUSY and ev.kind is K.RESPONSE_READY:
        if ev.text is None:
            logger.warning("ResponseReady without text ignored")
        else:
            _speak(ctx, ev.text)
    elif state is S.BUSY and ev.kind is K.RESPONSE_SPOKEN:
        ctx.machine.transition(S.IDLE)
    elif state is S.BUSY and ev.kind in (K.HOTWORD_DETECTED, K.WAKE_BUTTON_PRESSED):
        return interrupt_busy(ctx)
    elif state is S.BUSY and ev.kind is K.QUERY_FAILED:
        ctx.machine.transition(S.ERROR, ErrorInfo("query_failed", ev.message or "query failed"))
    elif state is S.ERROR and ev.kind is K.ERROR_ANNOUNCED:
        ctx.machine.transition(S.IDLE)
    else:
        logger.warning("event %s ignored in state %s", ev.kind, state)
    return ctx.take_actions()


def format_dispatch(ev: Event, before: StateId, after: StateId, actions: list[Action]) -> str:
    acts = ", ".join(str(a) for a in actions)
    return f"t={ev.timestamp} {ev.kind} | state:{before}->{after} | actions:[{acts}]"
