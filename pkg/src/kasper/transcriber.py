"""Desk-scale speech-to-text: per-frame letter scores, bigram LM, beam decoding.

Each 20 ms frame is scored against per-letter energy prototypes. The decoder
then searches symbol paths, collapsing repeats and blanks, and lets a bigram
language model over the collapsed text favour likely continuations
("MUM" -> "MUMB").
"""

from __future__ import annotations

import math
import string
from dataclasses import dataclass
from pathlib import Path

import numpy as np

BLANK = "_"
SPACE = " "
APOSTROPHE = "'"
# 28 emitting symbols plus the blank
LETTERS = tuple(string.ascii_uppercase) + (SPACE, APOSTROPHE)
ALPHABET = LETTERS + (BLANK,)
INDEX = {s: i for i, s in enumerate(ALPHABET)}
N_LM = len(LETTERS)

DEFAULT_BEAM_WIDTH = 8
DEFAULT_LM_WEIGHT = 0.5
DEFAULT_TEMPERATURE = 0.05

# names used in template fixture files for the non-letter symbols
_FILE_NAMES = {"SPACE": SPACE, "APOSTROPHE": APOSTROPHE, "BLANK": BLANK}


class TranscriberError(ValueError):
    pass


class MissingTemplate(TranscriberError):
    pass


class IllegalSymbol(TranscriberError):
    def __init__(self, word, position):
        super().__init__(f"illegal symbol {word[position]!r} in {word!r} at {position}")
        self.word = word
        self.position = position


class InvalidBeamWidth(TranscriberError):
    pass


class LetterScores:
    """Per-frame probability rows over ``ALPHABET`` (shape T x 29)."""

    def __init__(self, probs):
        p = np.array(probs, dtype=np.float64)
        if p.ndim != 2 or p.shape[1] != len(ALPHABET):
            raise TranscriberError(f"expected shape (T, {len(ALPHABET)}), got {p.shape}")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise TranscriberError("probabilities must be finite and non-negative")
        if p.size and np.max(np.abs(p.sum(axis=1) - 1.0)) > 1e-9:
            raise TranscriberError("each frame must sum to 1")
        p.setflags(write=False)
        self.probs = p

    def __len__(self) -> int:
        return self.probs.shape[0]

    @classmethod
    def from_rows(cls, rows: list[dict[str, float]]) -> "LetterScores":
        """Build from sparse ``{symbol: prob}`` rows; unspecified symbols get 0."""
        p = np.zeros((len(rows), len(ALPHABET)))
        for t, row in enumerate(rows):
            for sym, v in row.items():
                p[t, INDEX[sym]] = v
        return cls(p)

    def argmax_symbols(self) -> list[str]:
        return [ALPHABET[i] for i in np.argmax(self.probs, axis=1)]


def frame_features(frame, k: int) -> np.ndarray:
    """Energies of ``k`` equal sub-blocks of a frame."""
    parts = np.array_split(np.asarray(frame.samples, dtype=np.float64), k)
    return np.array([float(np.mean(p * p)) if p.size else 0.0 for p in parts])


def classify_frames(frames, letter_templates: dict[str, np.ndarray], *,
                    temperature: float = DEFAULT_TEMPERATURE) -> LetterScores:
    """Score each frame against every symbol prototype: p ~ exp(-distance / temperature)."""
    for sym in ALPHABET:
        if sym not in letter_templates:
            raise MissingTemplate(f"no template for symbol {sym!r}")
    frames = list(frames)
    if not frames:
        raise TranscriberError("no frames to classify")
    protos = np.array([np.asarray(letter_templates[s], dtype=np.float64) for s in ALPHABET])
    k = protos.shape[1]
    feats = np.array([frame_features(f, k) for f in frames])
    dist = np.sqrt(((feats[:, None, :] - protos[None, :, :]) ** 2).sum(axis=2))
    logits = -dist / temperature
    logits -= logits.max(axis=1, keepdims=True)
    w = np.exp(logits)
    return LetterScores(w / w.sum(axis=1, keepdims=True))


def collapse(symbols) -> str:
    out = []
    prev = None
    for s in symbols:
        if s != prev and s != BLANK:
            out.append(s)
        prev = s
    return "".join(out)


@dataclass(frozen=True)
class BigramLM:
    counts: np.ndarray  # (28, 28) raw pair counts, row = previous symbol

    def prob(self, prev: str, nxt: str) -> float:
        a, b = INDEX[prev], INDEX[nxt]
        row = self.counts[a]
        return float((row[b] + 1) / (row.sum() + N_LM))

    def log_prob(self, prev: str, nxt: str) -> float:
        return math.log(self.prob(prev, nxt))

    def matrix(self) -> np.ndarray:
        return (self.counts + 1) / (self.counts.sum(axis=1, keepdims=True) + N_LM)


def train_bigram_lm(corpus) -> BigramLM:
    counts = np.zeros((N_LM, N_LM), dtype=np.int64)
    for word in corpus:
        for pos, ch in enumerate(word):
            if ch not in LETTERS:
                raise IllegalSymbol(word, pos)
        for a, b in zip(word, word[1:]):
            counts[INDEX[a], INDEX[b]] += 1
    counts.setflags(write=False)
    return BigramLM(counts)


@dataclass(frozen=True)
class Transcript:
    text: str
    score: float
    path: tuple[str, ...] = ()
    steps: tuple[float, ...] = ()


def lm_term(lm: BigramLM, prev: str, nxt: str) -> float:
    """LM evidence for one emitted letter, measured against a uniform model.

    Equals log P(nxt | prev) + log 28, so a uniform LM contributes exactly 0
    and cannot reorder hypotheses.
    """
    return lm.log_prob(prev, nxt) + math.log(N_LM)


def decode_beam(scores: LetterScores, lm: BigramLM, beam_width: int = DEFAULT_BEAM_WIDTH,
                lm_weight: float = DEFAULT_LM_WEIGHT) -> Transcript:
    """Beam search over frame symbol paths, scored on acoustics plus weighted LM.

    Hypotheses sharing (collapsed text, last raw symbol) have identical
    futures, so only the best of them is kept.
    """
    if not isinstance(beam_width, int) or beam_width < 1:
        raise InvalidBeamWidth(f"beam width must be a positive integer, got {beam_width!r}")
    if lm_weight < 0:
        raise TranscriberError("lm_weight must be >= 0")

    with np.errstate(divide="ignore"):
        logp = np.log(scores.probs)

    # key: (text, last raw symbol) -> (score, path, steps)
    beam: dict[tuple[str, str | None], tuple[float, tuple[str, ...], tuple[float, ...]]] = {
        ("", None): (0.0, (), ())
    }
    for t in range(len(scores)):
        row = logp[t]
        nxt: dict = {}
        for (text, last), (score, path, steps) in beam.items():
            for i, sym in enumerate(ALPHABET):
                ac = row[i]
                if ac == -math.inf:
                    continue
                step = ac
                new_text = text
                if sym != BLANK and sym != last:
                    if text:
                        step += lm_weight * lm_term(lm, text[-1], sym)
                    new_text = text + sym
                key = (new_text, sym)
                cand = score + step
                old = nxt.get(key)
                if old is None or cand > old[0] or (cand == old[0] and path + (sym,) < old[1]):
                    nxt[key] = (cand, path + (sym,), steps + (step,))
        ranked = sorted(nxt.items(), key=lambda kv: (-kv[1][0], kv[1][1]))
        beam = dict(ranked[:beam_width])

    (text, _), (score, path, steps) = min(beam.items(), key=lambda kv: (-kv[1][0], kv[1][1]))
    return Transcript(text, float(score), path, steps)


def path_score(scores: LetterScores, path, lm: BigramLM, lm_weight: float) -> float:
    """Total score of one explicit symbol path (used to audit decoder output)."""
    ac = sum(math.log(scores.probs[t, INDEX[s]]) for t, s in enumerate(path))
    text = collapse(path)
    lm_total = sum(lm_term(lm, a, b) for a, b in zip(text, text[1:]))
    return ac + lm_weight * lm_total


def load_letter_templates(path) -> dict[str, np.ndarray]:
    """Parse ``SYM: e1 e2 ... ek`` lines (SPACE, APOSTROPHE and BLANK name the non-letters)."""
    out: dict[str, np.ndarray] = {}
    width = None
    for lineno, ln in enumerate(Path(path).read_text().splitlines(), 1):
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        name, sep, rest = ln.partition(":")
        if not sep:
            raise TranscriberError(f"{path}:{lineno}: expected 'SYM: values'")
        name = name.strip()
        sym = _FILE_NAMES.get(name, name)
        if sym not in INDEX:
            raise TranscriberError(f"{path}:{lineno}: unknown symbol {name!r}")
        vals = np.array([float(x) for x in rest.split()])
        if width is None:
            width = vals.size
        elif vals.size != width:
            raise TranscriberError(f"{path}:{lineno}: expected {width} values, got {vals.size}")
        out[sym] = vals
    return out


def synthesize_letters(text_symbols, templates: dict[str, np.ndarray], rate: int = 16_000,
                       frames_per_symbol: int = 1):
    """Audio whose frames reproduce the given symbols' prototypes exactly (sub-block constant amplitude)."""
    from kasper.audio import AudioSignal, window_length

    win = window_length(rate)
    chunks = []
    for sym in text_symbols:
        proto = np.asarray(templates[sym], dtype=np.float64)
        idx = np.array_split(np.arange(win), proto.size)
        frame = np.empty(win)
        for block, e in zip(idx, proto):
            frame[block] = np.sqrt(e)
        frame[1::2] *= -1
        chunks.extend([frame] * frames_per_symbol)
    return AudioSignal(rate, np.concatenate(chunks))


def transcribe(signal, templates, lm: BigramLM, *, beam_width: int = DEFAULT_BEAM_WIDTH,
               lm_weight: float = DEFAULT_LM_WEIGHT) -> Transcript:
    from kasper.audio import frame_signal

    return decode_beam(classify_frames(frame_signal(signal), templates), lm, beam_width, lm_weight)
