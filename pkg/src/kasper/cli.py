"""Command line interface: kasper <train|eval|classify|serve|simulate|repl|gen-corpus>.

Exit codes: 0 success, 1 invalid input, 2 internal invariant violation.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from kasper import brain as brain_mod
from kasper.corpus import CorpusSpec, generate_corpus
from kasper.fsm import FsmError
from kasper.intent import checkpoint
from kasper.intent.checkpoint import ALGORITHMS
from kasper.intent.classes import Dataset
from kasper.intent.pipeline import compare, format_comparison, prepare, train_bundle
from kasper.intent.training import TrainConfig, train_model
from kasper.sim import ReplSession, parse_scenario, run_scenario

log = logging.getLogger("kasper")

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 1, 2


class InvariantViolation(Exception):
    pass


def _train_config(args) -> TrainConfig:
    return TrainConfig(learning_rate=args.lr, epochs=args.epochs, seed=args.seed,
                       filters=args.filters, hidden=args.hidden)


def cmd_train(args) -> int:
    data = Dataset.load(args.data)
    train, _, table = prepare(data, args.seed, args.embeddings, args.dim)
    kinds = ("cnn", "rnn") if args.algo == "both" else (args.algo,)
    bundle, timings = train_bundle(train, table, kinds, _train_config(args), args.knn_k)
    checkpoint.save(bundle, args.out)
    for kind, secs in timings.items():
        print(f"trained {kind} on {len(train)} examples in {secs:.1f} s")
    print(f"checkpoint written to {args.out}")
    return EXIT_OK


def cmd_eval(args) -> int:
    bundle = checkpoint.load(args.ckpt)
    data = Dataset.load(args.data)
    train, held = data.split(bundle.seed)
    timings: dict[str, float] = {}
    if args.all_algos:
        # retrain both networks with the checkpoint's settings so their wall-clock can be compared
        base = next(iter(bundle.configs.values()), {"seed": bundle.seed})
        for kind in ("cnn", "rnn"):
            cfg = bundle.configs.get(kind) or {k: v for k, v in base.items() if k != "learning_rate"}
            t0 = time.perf_counter()
            bundle.models[kind] = train_model(kind, train, bundle.table, TrainConfig(**cfg))
            timings[kind] = time.perf_counter() - t0
    rows = compare(bundle, held, timings)
    print(f"held-out examples: {len(held)} (seed {bundle.seed})")
    print(format_comparison(rows))
    return EXIT_OK


def cmd_classify(args) -> int:
    service = brain_mod.BrainService(checkpoint.load(args.ckpt))
    print(service.query(args.text, args.algo).to_json())
    return EXIT_OK


def cmd_serve(args) -> int:
    registry = brain_mod.SkillRegistry.from_file(args.skills) if args.skills else None
    service = brain_mod.BrainService(registry=registry)
    host, port = brain_mod.parse_bind(args.bind)
    server = brain_mod.make_server(service, host, port)
    if args.ckpt:
        service.load(args.ckpt)
    print(f"brain listening on http://{host}:{server.server_address[1]}", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return EXIT_OK


def _brain_for(args):
    if getattr(args, "brain_url", None):
        return brain_mod.HttpBrain(args.brain_url, args.algo)
    if getattr(args, "ckpt", None):
        return brain_mod.LocalBrain(brain_mod.BrainService(checkpoint.load(args.ckpt)), args.algo)
    return None


def cmd_simulate(args) -> int:
    scenario = parse_scenario(args.scenario)
    report = run_scenario(scenario, _brain_for(args))
    text = report.render()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if report.violations:
        raise InvariantViolation(f"{len(report.violations)} invariant violation(s)")
    return EXIT_OK


def cmd_repl(args) -> int:
    session = ReplSession(_brain_for(args), auto=not args.manual)
    print("kasper repl: type an utterance, or !help")
    for line in sys.stdin:
        for out in session.handle_line(line):
            print(out)
        print(f"[{session.sim.ctx.state}]", flush=True)
        if session.done:
            break
    if session.sim.violations:
        raise InvariantViolation("; ".join(session.sim.violations))
    return EXIT_OK


def cmd_gen_corpus(args) -> int:
    data = generate_corpus(CorpusSpec(seed=args.seed, per_class=args.per_class))
    if args.out:
        data.save(args.out)
        print(f"wrote {len(data)} examples to {args.out}")
    else:
        sys.stdout.write(data.dumps())
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kasper", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    t = sub.add_parser("train", help="train a classifier checkpoint")
    t.add_argument("--data", required=True)
    t.add_argument("--algo", choices=("cnn", "rnn", "both"), default="cnn")
    t.add_argument("--seed", type=int, default=42)
    t.add_argument("--epochs", type=int, default=40)
    t.add_argument("--lr", type=float, default=None, help="default: 0.05 (cnn), 0.01 (rnn)")
    t.add_argument("--filters", type=int, default=16)
    t.add_argument("--hidden", type=int, default=32)
    t.add_argument("--dim", type=int, default=50, help="dimension of seeded random embeddings")
    t.add_argument("--embeddings", help="pre-trained embeddings in whitespace text layout")
    t.add_argument("--knn-k", type=int, default=5)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="evaluate on the held-out split")
    e.add_argument("--data", required=True)
    e.add_argument("--ckpt", required=True)
    e.add_argument("--all-algos", action="store_true", help="(re)train cnn and rnn and time them")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("classify", help="classify one utterance")
    c.add_argument("--ckpt", required=True)
    c.add_argument("--text", required=True)
    c.add_argument("--algo", choices=ALGORITHMS, default="cnn")
    c.set_defaults(func=cmd_classify)

    s = sub.add_parser("serve", help="run the HTTP brain service")
    s.add_argument("--ckpt")
    s.add_argument("--bind", default=f"{brain_mod.DEFAULT_HOST}:{brain_mod.DEFAULT_PORT}")
    s.add_argument("--skills", help="skill template overrides: <class-label>\\t<template> lines")
    s.set_defaults(func=cmd_serve)

    m = sub.add_parser("simulate", help="run a scenario file")
    m.add_argument("--scenario", required=True)
    m.add_argument("--ckpt")
    m.add_argument("--brain-url")
    m.add_argument("--algo", choices=ALGORITHMS, default="cnn")
    m.add_argument("--out")
    m.set_defaults(func=cmd_simulate)

    r = sub.add_parser("repl", help="interactive text session")
    r.add_argument("--ckpt")
    r.add_argument("--brain-url")
    r.add_argument("--algo", choices=ALGORITHMS, default="cnn")
    r.add_argument("--manual", action="store_true", help="do not auto-complete turns")
    r.set_defaults(func=cmd_repl)

    g = sub.add_parser("gen-corpus", help="write the synthetic corpus")
    g.add_argument("--seed", type=int, default=42)
    g.add_argument("--per-class", type=int, default=50)
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen_corpus)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.ERROR,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (InvariantViolation, FsmError) as e:
        print(f"internal invariant violation: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValueError, OSError, brain_mod.BrainError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
