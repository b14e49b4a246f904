"""The query service: classify an utterance, route it to a skill, answer over HTTP.

Endpoints (JSON over HTTP/1.1)::

    POST /query[?algo=cnn|rnn|knn|fuzzy]   {"text": "..."}
         -> 200 {"intent", "confidence", "response", "classifier"}
         -> 400 {"error"} on empty/malformed text or unknown algorithm
         -> 503 {"error"} before a checkpoint is loaded
    GET  /health  -> 200 {"status": "ok"} once loaded, else 503
"""

from __future__ import annotations

import json
import logging
import threading
import urllib.error
import urllib.parse
import urllib.request
from dataclasses import asdict, dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from kasper.intent import checkpoint
from kasper.intent.checkpoint import ALGORITHMS, AlgorithmUnavailable, ModelBundle
from kasper.intent.classes import CLASS_INDEX, CLASSES

logger = logging.getLogger(__name__)

DEFAULT_HOST = "127.0.0.1"
DEFAULT_PORT = 7431
DEFAULT_ALGO = "cnn"

DEFAULT_SKILLS: dict[str, str] = {
    "Art and Beauty": "Here is some art and beauty inspiration for: {query}",
    "Business and Finance": "Here is the latest financial information for: {query}",
    "Communication": "Okay, handling your message or call: {query}",
    "Connected Car": "Sending this to your car: {query}",
    "Food and Drink": "Here is what I found about food and drink for: {query}",
    "Games, Trivia, and Accessories": "Let's play! Starting: {query}",
    "Health and Fitness": "Here is your health and fitness update for: {query}",
    "Interests": "Here is something about your interests: {query}",
    "Knowledge": "Here is what I know about: {query}",
    "Lifestyle": "Here is a lifestyle tip for: {query}",
    "Movies and TV Shows": "Here is what I found in movies and TV for: {query}",
    "Music and Audio": "Playing music for: {query}",
    "News": "Here are the headlines for: {query}",
    "Novelty and Humour": "Here is something fun for: {query}",
    "Problem Solving": "Let me work that out: {query}",
    "Productivity": "Added to your schedule: {query}",
    "Shopping": "Here are shopping results for: {query}",
    "Social": "Here is your social update for: {query}",
    "Sports": "Here are the sports results for: {query}",
    "Travel and Transportation": "Here are travel options for: {query}",
    "Utilities": "Done: {query}",
    "Weather": "Here is the weather for: {query}",
}


class BrainError(Exception):
    status = 500


class BadQuery(BrainError):
    status = 400


class NoCheckpoint(BrainError):
    status = 503


class BrainUnavailable(BrainError):
    status = 503


class SkillRegistry:
    """Response template per intent class; always total over the 22 classes."""

    def __init__(self, templates: dict[str, str] | None = None):
        merged = dict(DEFAULT_SKILLS)
        for label, tmpl in (templates or {}).items():
            if label not in CLASS_INDEX:
                raise ValueError(f"skill template for unknown class {label!r}")
            merged[label] = tmpl
        self.templates = {c: merged[c] for c in CLASSES}

    @classmethod
    def from_file(cls, path) -> "SkillRegistry":
        """Overrides in ``<class-label>\\t<template>`` lines; other classes keep the defaults."""
        overrides = {}
        for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            label, sep, tmpl = line.partition("\t")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected '<class-label>\\t<template>'")
            overrides[label] = tmpl
        return cls(overrides)

    def route(self, intent: str, text: str) -> str:
        return self.templates[intent].replace("{query}", text)


def route(intent: str, text: str, registry: SkillRegistry | None = None) -> str:
    if intent not in CLASS_INDEX:
        raise ValueError(f"unknown intent {intent!r}")
    return (registry or SkillRegistry()).route(intent, text)


@dataclass(frozen=True)
class QueryRequest:
    text: str

    @classmethod
    def from_json(cls, body: bytes | str) -> "QueryRequest":
        try:
            data = json.loads(body)
        except (ValueError, UnicodeDecodeError):
            raise BadQuery("request body is not valid JSON") from None
        if not isinstance(data, dict) or not isinstance(data.get("text"), str):
            raise BadQuery('request must be {"text": string}')
        return cls(data["text"])


@dataclass(frozen=True)
class QueryResponse:
    intent: str
    confidence: float
    response: str
    classifier: str

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False)

    @classmethod
    def from_dict(cls, data: dict) -> "QueryResponse":
        return cls(data["intent"], data["confidence"], data["response"], data["classifier"])


def handle_query(req: QueryRequest, bundle: ModelBundle | None, registry: SkillRegistry,
                 algo: str = DEFAULT_ALGO) -> QueryResponse:
    if bundle is None:
        raise NoCheckpoint("no checkpoint loaded")
    text = req.text.strip()
    if not text:
        raise BadQuery("text must be non-empty")
    if algo not in ALGORITHMS:
        raise BadQuery(f"unknown algorithm {algo!r}; expected one of {', '.join(ALGORITHMS)}")
    try:
        pred = bundle.classify(text, algo)
    except AlgorithmUnavailable as e:
        raise BadQuery(str(e)) from None
    return QueryResponse(pred.label, pred.confidence, registry.route(pred.label, text), algo)


class BrainService:
    """Holds the current bundle; reloads swap it atomically under a lock."""

    def __init__(self, bundle: ModelBundle | None = None, registry: SkillRegistry | None = None):
        self._bundle = bundle
        self.registry = registry or SkillRegistry()
        self._reload_lock = threading.Lock()

    @property
    def bundle(self) -> ModelBundle | None:
        return self._bundle

    def load(self, path) -> None:
        bundle = checkpoint.load(path)
        with self._reload_lock:
            self._bundle = bundle

    def query(self, text: str, algo: str = DEFAULT_ALGO) -> QueryResponse:
        # read the reference once so a concurrent reload cannot split one request across bundles
        bundle = self._bundle
        return handle_query(QueryRequest(text), bundle, self.registry, algo)


class _Handler(BaseHTTPRequestHandler):
    server_version = "KasperBrain/1.0"
    service: BrainService

    def log_message(self, fmt, *args):
        logger.debug("%s - %s", self.address_string(), fmt % args)

    def _send(self, status: int, body: str) -> None:
        data = body.encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def _error(self, status: int, message: str) -> None:
        self._send(status, json.dumps({"error": message}))

    def do_GET(self):
        url = urllib.parse.urlsplit(self.path)
        if url.path != "/health":
            return self._error(404, f"no route {url.path}")
        if self.service.bundle is None:
            return self._error(503, "no checkpoint loaded")
        self._send(200, json.dumps({"status": "ok"}))

    def do_POST(self):
        url = urllib.parse.urlsplit(self.path)
        if url.path != "/query":
            return self._error(404, f"no route {url.path}")
        algo = urllib.parse.parse_qs(url.query).get("algo", [DEFAULT_ALGO])[-1]
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length)
        try:
            req = QueryRequest.from_json(body)
            resp = handle_query(req, self.service.bundle, self.service.registry, algo)
        except BrainError as e:
            return self._error(e.status, str(e))
        self._send(200, resp.to_json())


def make_server(service: BrainService, host: str = DEFAULT_HOST, port: int = DEFAULT_PORT
                ) -> ThreadingHTTPServer:
    handler = type("BrainHandler", (_Handler,), {"service": service})
    server = ThreadingHTTPServer((host, port), handler)
    server.daemon_threads = True
    return server


def parse_bind(bind: str) -> tuple[str, int]:
    host, sep, port = bind.rpartition(":")
    if not sep:
        return bind, DEFAULT_PORT
    return host or DEFAULT_HOST, int(port)


# -- clients used by the assistant ----------------------------------------------


class LocalBrain:
    """In-process brain handle."""

    def __init__(self, service: BrainService, algo: str = DEFAULT_ALGO):
        self.service = service
        self.algo = algo

    def query(self, text: str) -> QueryResponse:
        return self.service.query(text, self.algo)


class HttpBrain:
    """Brain reached over HTTP; same answers as :class:`LocalBrain` for the same checkpoint."""

    def __init__(self, base_url: str, algo: str = DEFAULT_ALGO, timeout: float = 10.0):
        self.base_url = base_url.rstrip("/")
        self.algo = algo
        self.timeout = timeout

    def query(self, text: str) -> QueryResponse:
        url = f"{self.base_url}/query?algo={urllib.parse.quote(self.algo)}"
        req = urllib.request.Request(url, data=json.dumps({"text": text}).encode("utf-8"),
                                     headers={"Content-Type": "application/json"}, method="POST")
        try:
            with urllib.request.urlopen(req, timeout=self.timeout) as resp:
                return QueryResponse.from_dict(json.loads(resp.read()))
        except urllib.error.HTTPError as e:
            detail = json.loads(e.read() or b"{}").get("error", e.reason)
            err = BadQuery if e.code == 400 else BrainUnavailable
            raise err(f"brain returned {e.code}: {detail}") from None
        except urllib.error.URLError as e:
            raise BrainUnavailable(f"cannot reach brain at {self.base_url}: {e.reason}") from None
