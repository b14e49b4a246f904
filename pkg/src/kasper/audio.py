"""Sampled audio, 20 ms framing and an energy-envelope hotword detector."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

FRAME_SECONDS = 0.020
DEFAULT_RATE = 16_000
DEFAULT_THRESHOLD = 0.90


class AudioError(ValueError):
    pass


class EmptySignal(AudioError):
    pass


class TemplateTooLong(AudioError):
    pass


@dataclass(frozen=True)
class AudioSignal:
    rate: int
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if int(self.rate) != self.rate or self.rate <= 0:
            raise AudioError(f"sample rate must be a positive integer, got {self.rate}")
        if samples.ndim != 1:
            raise AudioError("samples must be one-dimensional")
        if samples.size and (not np.all(np.isfinite(samples)) or np.max(np.abs(samples)) > 1.0):
            raise AudioError("samples must lie in [-1, 1]")
        samples.setflags(write=False)
        object.__setattr__(self, "rate", int(self.rate))
        object.__setattr__(self, "samples", samples)

    def scaled(self, factor: float) -> "AudioSignal":
        return AudioSignal(self.rate, self.samples * factor)


@dataclass(frozen=True)
class Frame:
    index: int
    samples: np.ndarray = field(repr=False)

    @property
    def energy(self) -> float:
        return float(np.mean(self.samples * self.samples))


@dataclass(frozen=True)
class HotwordTemplate:
    envelope: tuple[float, ...]
    threshold: float = DEFAULT_THRESHOLD

    def __post_init__(self):
        env = tuple(float(e) for e in self.envelope)
        if len(env) < 2:
            raise AudioError("template envelope needs at least 2 frames")
        if not 0.0 < self.threshold <= 1.0:
            raise AudioError(f"threshold must be in (0, 1], got {self.threshold}")
        object.__setattr__(self, "envelope", env)


@dataclass(frozen=True)
class SamplingViolation:
    rate: int
    max_frequency: float

    @property
    def minimum_rate(self) -> float:
        return 2 * self.max_frequency

    def __str__(self) -> str:
        return (f"rate {self.rate} Hz cannot represent {self.max_frequency} Hz; "
                f"requires rate > {self.minimum_rate:g} Hz")


def validate_sampling(rate: float, max_frequency: float) -> SamplingViolation | None:
    """Return None when ``rate`` strictly exceeds twice ``max_frequency``."""
    if rate <= 0 or max_frequency <= 0:
        raise AudioError("rate and max_frequency must be positive")
    if rate > 2 * max_frequency:
        return None
    return SamplingViolation(rate, max_frequency)


def window_length(rate: int) -> int:
    # integer arithmetic: rate * 0.020 == rate // 50 without float rounding
    return (int(rate) * 20) // 1000


def frame_signal(sig: AudioSignal) -> list[Frame]:
    """Split into consecutive non-overlapping 20 ms frames; a trailing partial frame is dropped."""
    if sig.samples.size == 0:
        raise EmptySignal("cannot frame an empty signal")
    win = window_length(sig.rate)
    if win == 0:
        return []
    count = sig.samples.size // win
    return [Frame(i, sig.samples[i * win:(i + 1) * win]) for i in range(count)]


def energy_envelope(frames) -> np.ndarray:
    return np.array([f.energy for f in frames], dtype=np.float64)


def pearson(a: np.ndarray, b: np.ndarray) -> float:
    """Pearson correlation; zero variance on either side correlates as 0."""
    a = np.asarray(a, dtype=np.float64) - np.mean(a)
    b = np.asarray(b, dtype=np.float64) - np.mean(b)
    na = np.sqrt(np.dot(a, a))
    nb = np.sqrt(np.dot(b, b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def detect_hotword(frames, tmpl: HotwordTemplate) -> int | None:
    """Smallest frame offset whose energy envelope correlates with the template at or above threshold."""
    env = energy_envelope(frames)
    L = len(tmpl.envelope)
    if len(env) < L:
        raise TemplateTooLong(f"template spans {L} frames but only {len(env)} available")
    ref = np.array(tmpl.envelope)
    for o in range(len(env) - L + 1):
        if pearson(ref, env[o:o + L]) >= tmpl.threshold:
            return o
    return None


# -- fixture files ------------------------------------------------------------


def read_signal(path) -> AudioSignal:
    """Read ``rate=<Hz>`` followed by one amplitude per line."""
    lines = [ln.strip() for ln in Path(path).read_text().splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines or not lines[0].startswith("rate="):
        raise AudioError(f"{path}: first line must be rate=<Hz>")
    rate = int(lines[0][len("rate="):])
    return AudioSignal(rate, np.array([float(x) for x in lines[1:]], dtype=np.float64))


def write_signal(sig: AudioSignal, path) -> None:
    body = "\n".join(repr(float(x)) for x in sig.samples)
    Path(path).write_text(f"rate={sig.rate}\n{body}\n")


def read_template(path) -> HotwordTemplate:
    """Template file: optional ``threshold=<x>`` line, then envelope values (whitespace separated)."""
    threshold = DEFAULT_THRESHOLD
    values: list[float] = []
    for ln in Path(path).read_text().splitlines():
        ln = ln.split("#", 1)[0].strip()
        if not ln:
            continue
        if ln.startswith("threshold="):
            threshold = float(ln[len("threshold="):])
        else:
            values.extend(float(x) for x in ln.split())
    return HotwordTemplate(tuple(values), threshold)


def synthesize(envelope, rate: int = DEFAULT_RATE, *, noise: float = 0.0, seed: int = 0) -> AudioSignal:
    """Build a signal whose per-frame energies follow ``envelope`` (constant-amplitude frames)."""
    win = window_length(rate)
    rng = np.random.default_rng(seed)
    out = []
    for e in envelope:
        amp = np.sqrt(e)
        frame = np.full(win, amp)
        frame[1::2] *= -1
        if noise:
            frame = frame + rng.uniform(-noise, noise, win)
        out.append(np.clip(frame, -1.0, 1.0))
    return AudioSignal(rate, np.concatenate(out) if out else np.zeros(0))
