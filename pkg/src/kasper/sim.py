"""Deterministic conversation simulator on a virtual millisecond clock.

Scenario files hold one event per line::

    # comment
    t=0 MediaCommand play jazz-01
    t=100 HotwordDetected
    t=300 TranscriptReady "what is the weather"
    t=350 ResponseReady                        # text taken from the brain's answer
    t=360 ResponseReady Weather "It is sunny"  # or scripted explicitly
    t=400 AudioFixture speech.sig kasper.tmpl  # enqueues HotwordDetected on detection

Events are dispatched through one FIFO queue; actions are executed by
appending to the report, and the assistant invariants are checked after
every dispatch.
"""

from __future__ import annotations

import re
import shlex
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path

from kasper import audio
from kasper.assistant import (
    Action,
    ActionKind,
    AssistantContext,
    Event,
    EventKind,
    format_dispatch,
    handle_event,
    new_context,
)
from kasper.brain import BrainUnavailable, QueryResponse
from kasper.fsm import MediaStatus, StateId
from kasper.intent.classes import CLASS_INDEX

AUDIO_FIXTURE = "AudioFixture"
_LINE = re.compile(r"t=(\d+)\s+(\S+)(.*)$")
_BARE = re.compile(r"[A-Za-z0-9_.,:/+\-]+")


class ScenarioError(ValueError):
    pass


class ParseError(ScenarioError):
    def __init__(self, line: int, reason: str):
        super().__init__(f"line {line}: {reason}")
        self.line = line
        self.reason = reason


class NonMonotoneTimestamps(ScenarioError):
    def __init__(self, line: int):
        super().__init__(f"line {line}: timestamp goes backwards")
        self.line = line


@dataclass(frozen=True)
class AudioFixture:
    timestamp: int
    signal: str
    template: str

    def args(self) -> list[str]:
        return [self.signal, self.template]

    @property
    def kind(self) -> str:
        return AUDIO_FIXTURE


Entry = Event | AudioFixture


@dataclass
class Scenario:
    entries: list[Entry] = field(default_factory=list)
    base_dir: Path | None = None

    def format(self) -> str:
        return format_scenario(self)


def _quote(arg: str) -> str:
    if arg and _BARE.fullmatch(arg):
        return arg
    return '"' + arg.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_entry(entry: Entry) -> str:
    parts = [f"t={entry.timestamp}", str(entry.kind)] + [_quote(a) for a in entry.args()]
    return " ".join(parts)


def format_scenario(scenario: Scenario) -> str:
    return "".join(format_entry(e) + "\n" for e in scenario.entries)


def _build_event(kind: str, t: int, args: list[str], lineno: int) -> Entry:
    def arity(*allowed):
        if len(args) not in allowed:
            raise ParseError(lineno, f"{kind} takes {' or '.join(map(str, allowed))} argument(s), got {len(args)}")

    if kind == AUDIO_FIXTURE:
        arity(2)
        return AudioFixture(t, args[0], args[1])
    try:
        ek = EventKind(kind)
    except ValueError:
        raise ParseError(lineno, f"unknown event kind {kind!r}") from None
    try:
        if ek in (EventKind.HOTWORD_DETECTED, EventKind.WAKE_BUTTON_PRESSED,
                  EventKind.RESPONSE_SPOKEN, EventKind.ERROR_ANNOUNCED):
            arity(0)
            return Event(ek, t)
        if ek is EventKind.TRANSCRIPT_READY:
            arity(1)
            return Event(ek, t, text=args[0])
        if ek in (EventKind.RECOGNITION_FAILED, EventKind.QUERY_FAILED):
            arity(0, 1)
            return Event(ek, t, message=args[0] if args else None)
        if ek is EventKind.RESPONSE_READY:
            arity(0, 2)
            if not args:
                return Event(ek, t)
            if args[0] and args[0] not in CLASS_INDEX:
                raise ParseError(lineno, f"unknown intent class {args[0]!r}")
            return Event(ek, t, intent=args[0] or None, text=args[1])
        arity(1, 2)
        return Event(ek, t, command=args[0], track=args[1] if len(args) > 1 else None)
    except ValueError as e:
        if isinstance(e, ParseError):
            raise
        raise ParseError(lineno, str(e)) from None


def parse_scenario_text(text: str, base_dir: Path | None = None) -> Scenario:
    entries: list[Entry] = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        try:
            tokens = shlex.split(raw, comments=True)
        except ValueError as e:
            raise ParseError(lineno, str(e)) from None
        if not tokens:
            continue
        m = _LINE.match(" ".join(tokens[:2]))
        if m is None or len(tokens) < 2:
            raise ParseError(lineno, "expected 't=<ms> <EventKind> [args]'")
        t = int(m.group(1))
        if t < last:
            raise NonMonotoneTimestamps(lineno)
        last = t
        entries.append(_build_event(tokens[1], t, tokens[2:], lineno))
    return Scenario(entries, base_dir)


def parse_scenario(path) -> Scenario:
    path = Path(path)
    return parse_scenario_text(path.read_text(encoding="utf-8"), path.parent)


# -- simulation -----------------------------------------------------------------


@dataclass
class SimReport:
    lines: list[str]
    media_log: list[str]
    spoken: list[str]
    brain_log: list[str]
    final_state: StateId
    stack_depth: int
    violations: list[str]
    state_trace: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def render(self) -> str:
        out = ["# events"]
        out += self.lines
        out.append("# state trace")
        out.append(" -> ".join(self.state_trace))
        out.append("# media")
        out += self.media_log or ["(none)"]
        out.append("# spoken")
        out += self.spoken or ["(none)"]
        out.append("# brain")
        out += self.brain_log or ["(none)"]
        out.append(f"final_state: {self.final_state}")
        out.append(f"stack_depth: {self.stack_depth}")
        out.append("violations: " + ("none" if not self.violations else str(len(self.violations))))
        out += [f"  {v}" for v in self.violations]
        return "\n".join(out) + "\n"


class Simulator:
    """Feeds events to an assistant context and audits every step."""

    def __init__(self, brain=None, base_dir: Path | None = None, ctx: AssistantContext | None = None):
        self.ctx = ctx or new_context(brain)
        self.brain = brain if brain is not None else self.ctx.brain
        self.base_dir = Path(base_dir) if base_dir else Path(".")
        self.queue: deque[Entry] = deque()
        self.clock = 0
        self.lines: list[str] = []
        self.media_log: list[str] = []
        self.spoken: list[str] = []
        self.brain_log: list[str] = []
        self.violations: list[str] = []
        self.state_trace: list[str] = [str(self.ctx.state)]
        self.responses: list[QueryResponse] = []
        self._current_response: QueryResponse | None = None
        self._busy_detector = False
        self._pending_resumes = 0
        self._expected_depth = 0

    # public API

    def submit(self, entry: Entry) -> None:
        self.queue.append(entry)

    def run_queue(self) -> None:
        while self.queue:
            self._process(self.queue.popleft())

    def step(self, entry: Entry) -> list[Action]:
        """Dispatch one entry immediately (plus anything it enqueues); returns the actions of ``entry``."""
        self.submit(entry)
        first = self._process(self.queue.popleft())
        self.run_queue()
        return first

    def report(self) -> SimReport:
        return SimReport(list(self.lines), list(self.media_log), list(self.spoken), list(self.brain_log),
                         self.ctx.state, len(self.ctx.interrupts), list(self.violations),
                         list(self.state_trace))

    # internals

    def _process(self, entry: Entry) -> list[Action]:
        if entry.timestamp < self.clock:
            raise ScenarioError(f"event at t={entry.timestamp} precedes clock {self.clock}")
        self.clock = entry.timestamp
        if isinstance(entry, AudioFixture):
            self._audio(entry)
            return []
        return self._dispatch(entry)

    def _audio(self, fx: AudioFixture) -> None:
        sig = audio.read_signal(self.base_dir / fx.signal)
        tmpl = audio.read_template(self.base_dir / fx.template)
        offset = audio.detect_hotword(audio.frame_signal(sig), tmpl)
        if offset is None:
            self.lines.append(f"t={fx.timestamp} {AUDIO_FIXTURE} | no detection")
            return
        self.lines.append(f"t={fx.timestamp} {AUDIO_FIXTURE} | detected at frame {offset}")
        self.queue.appendleft(Event(EventKind.HOTWORD_DETECTED, fx.timestamp))

    def _dispatch(self, ev: Event) -> list[Action]:
        ctx = self.ctx
        if ev.kind is EventKind.RESPONSE_READY and ev.text is None and ctx.state is StateId.BUSY:
            resp = self._current_response
            if resp is None:
                raise BrainUnavailable(f"t={ev.timestamp}: ResponseReady needs a brain response but no brain is attached")
            ev = Event(EventKind.RESPONSE_READY, ev.timestamp, intent=resp.intent, text=resp.response)

        before = ctx.state
        depth_before = len(ctx.interrupts)
        interrupting = before is StateId.BUSY and ev.kind in (EventKind.HOTWORD_DETECTED,
                                                               EventKind.WAKE_BUTTON_PRESSED)
        actions = handle_event(ctx, ev)
        after = ctx.state
        self.lines.append(format_dispatch(ev, before, after, actions))
        if after != before:
            self.state_trace.append(str(after))
        for action in actions:
            self._execute(ev, action)
        if after is not StateId.BUSY:
            self._current_response = None
        self._audit(ev, before, after, actions, interrupting, depth_before)
        return actions

    def _execute(self, ev: Event, action: Action) -> None:
        t = ev.timestamp
        k = action.kind
        media = self.ctx.media
        if k is ActionKind.CALL_BRAIN:
            if self.brain is None:
                self.brain_log.append(f"t={t} CallBrain {_quote(action.arg)} -> (no brain attached)")
                return
            resp = self.brain.query(action.arg)
            self._current_response = resp
            self.responses.append(resp)
            self.brain_log.append(
                f"t={t} CallBrain {_quote(action.arg)} -> intent={_quote(resp.intent)} "
                f"confidence={resp.confidence!r} classifier={resp.classifier}"
            )
        elif k is ActionKind.SPEAK:
            self.spoken.append(f"t={t} {action.arg}")
        elif k is ActionKind.PLAY_MEDIA:
            self.media_log.append(f"t={t} PlayMedia {action.arg}")
        elif k in (ActionKind.PAUSE_MEDIA, ActionKind.RESUME_MEDIA):
            self.media_log.append(f"t={t} {k} {media.track}")
        elif k is ActionKind.STOP_MEDIA:
            self.media_log.append(f"t={t} StopMedia")

    def _audit(self, ev, before, after, actions, interrupting, depth_before) -> None:
        ctx = self.ctx
        t = ev.timestamp
        bad = self.violations

        def flag(msg):
            bad.append(f"t={t}: {msg}")

        if after not in StateId:
            flag(f"undeclared state {after!r}")
        for a in actions:
            if a.kind is ActionKind.START_BUSY_HOTWORD_DETECTOR:
                if self._busy_detector:
                    flag("busy detector started twice")
                self._busy_detector = True
            elif a.kind is ActionKind.STOP_BUSY_HOTWORD_DETECTOR:
                if not self._busy_detector:
                    flag("busy detector stopped while not running")
                self._busy_detector = False
            elif a.kind is ActionKind.START_RECOGNIZER and after is not StateId.RECOGNIZING:
                flag("StartRecognizer emitted without entering Recognizing")
            elif a.kind is ActionKind.PAUSE_MEDIA and interrupting:
                self._pending_resumes += 1
            elif a.kind is ActionKind.RESUME_MEDIA:
                if self._pending_resumes == 0:
                    flag("ResumeMedia without a matching interrupt pause")
                else:
                    self._pending_resumes -= 1
        if self._busy_detector != (after is StateId.BUSY):
            flag(f"busy detector {'running' if self._busy_detector else 'stopped'} in {after}")

        if ev.kind is EventKind.MEDIA_COMMAND and any(
                a.kind in (ActionKind.PLAY_MEDIA, ActionKind.PAUSE_MEDIA, ActionKind.STOP_MEDIA) for a in actions):
            # a user media command supersedes pending interrupt resumes
            self._pending_resumes = 0

        if interrupting:
            self._expected_depth += 1
        if after is StateId.IDLE:
            self._expected_depth = 0
        if len(ctx.interrupts) != self._expected_depth:
            flag(f"interrupt stack depth {len(ctx.interrupts)} != unresolved interrupts {self._expected_depth}")
        # a failed nested query keeps its interrupts until the error is announced
        if after is StateId.IDLE and (ctx.interrupts or self._pending_resumes):
            flag("Idle with unresolved interrupts")

        for msg in ctx.media.check():
            flag(msg)
        if ctx.media.status is MediaStatus.PAUSED and not ctx.interrupts and not ctx.user_paused:
            flag("media paused with no interrupt and no user pause")


def run_scenario(scenario: Scenario, brain=None, ctx: AssistantContext | None = None) -> SimReport:
    sim = Simulator(brain, scenario.base_dir, ctx)
    for entry in scenario.entries:
        sim.submit(entry)
    sim.run_queue()
    return sim.report()


# -- interactive session ----------------------------------------------------------

REPL_HELP = """\
commands:
  <text>         speak an utterance (wakes the assistant first when idle)
  !wake          hotword detected         !button   wake button pressed
  !ready         response ready           !spoken   response spoken
  !fail <msg>    recognition failed       !announced  error message spoken
  !play <track>  play media               !pause / !stop
  !help          this help                !quit
"""


class ReplSession:
    """Maps typed lines to events on a virtual clock advancing 100 ms per event.

    With ``auto`` enabled, a typed utterance also produces the wake-up and the
    response events around it, so each line is one full conversational turn.
    """

    STEP_MS = 100

    def __init__(self, brain=None, auto: bool = True):
        self.sim = Simulator(brain)
        self.auto = auto
        self.events: list[Event] = []
        self.clock = 0
        self.done = False

    def _next_time(self) -> int:
        t = self.clock
        self.clock += self.STEP_MS
        return t

    def _send(self, kind: EventKind, **kw) -> list[str]:
        ev = Event(kind, self._next_time(), **kw)
        n = len(self.sim.lines)
        nb = len(self.sim.brain_log)
        self.sim.step(ev)
        self.events.append(ev)
        out = self.sim.lines[n:]
        out += [f"  brain: {ln}" for ln in self.sim.brain_log[nb:]]
        return out

    def handle_line(self, line: str) -> list[str]:
        line = line.strip()
        if not line:
            return []
        K = EventKind
        state = self.sim.ctx.state
        if line.startswith("!"):
            cmd, _, rest = line[1:].partition(" ")
            rest = rest.strip()
            simple = {"wake": K.HOTWORD_DETECTED, "button": K.WAKE_BUTTON_PRESSED, "ready": K.RESPONSE_READY,
                      "spoken": K.RESPONSE_SPOKEN, "announced": K.ERROR_ANNOUNCED}
            if cmd in ("quit", "exit"):
                self.done = True
                return []
            if cmd == "help":
                return REPL_HELP.splitlines()
            if cmd in simple:
                return self._send(simple[cmd])
            if cmd == "fail":
                out = self._send(K.RECOGNITION_FAILED, message=rest or "recognition failed")
                if self.auto and self.sim.ctx.state is StateId.ERROR:
                    out += self._send(K.ERROR_ANNOUNCED)
                return out
            if cmd == "play":
                if not rest:
                    return ["usage: !play <track>"]
                return self._send(K.MEDIA_COMMAND, command="play", track=rest)
            if cmd in ("pause", "stop"):
                return self._send(K.MEDIA_COMMAND, command=cmd)
            return [f"unknown command !{cmd}; try !help"]

        out = []
        if self.auto and state in (StateId.IDLE, StateId.BUSY):
            out += self._send(K.HOTWORD_DETECTED)
        out += self._send(K.TRANSCRIPT_READY, text=line)
        if self.auto and self.sim.ctx.state is StateId.BUSY and self.sim.brain is not None:
            out += self._send(K.RESPONSE_READY)
            out += self._send(K.RESPONSE_SPOKEN)
        return out

    def scenario(self) -> Scenario:
        """The events dispatched so far, as an equivalent scenario."""
        return Scenario(list(self.events))
