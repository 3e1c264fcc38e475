"""Command line surface: every pipeline stage as a subcommand.

    hide    anonymize a text and print it (or the full document as JSON)
    seek    restore originals in an LLM output using a saved document
    run     recognize -> (review) -> hide -> backend -> seek, end to end
    attack  train an attacker and score a hiding strategy on a corpus
    eval    the protection-vs-budget grid over strategies and attackers
    synth   generate a corpus plus hide/seek training files
    serve   start the anonymizing chat-completions proxy

Exit codes: 0 success, 1 usage error, 2 runtime failure. Every subcommand
accepts --config and --seed; flags beat config file values beat defaults.
--seed random draws one seed from system entropy and logs it to stderr so
the run stays reproducible after the fact.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import replace
from pathlib import Path

from .adversary import (
    HISTOGRAM_BUCKETS,
    IdentityAttacker,
    ProtectionReport,
    evaluate_protection,
    train_black_box,
    train_white_box,
)
from .config import (
    AppConfig,
    apply_overrides,
    build_backend,
    build_gateway_config,
    load_config,
)
from .corpus import synth_corpus
from .dataset import (
    read_corpus,
    render_hide_template,
    render_seek_template,
    split_records,
    synth_hide_corpus,
    synth_seek_corpus,
    write_corpus,
    write_jsonl,
    write_templates,
)
from .errors import ConfigError
from .evalgrid import format_eval_table, run_eval_grid
from .pipeline import HideEngine, MockSubstitute, run_pipeline
from .recognizer import merge_spans
from .seek import seek
from .textutil import iter_token_bounded
from .types import AnonymizedDocument, EntitySpan, EntityType


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here reserves 2 for
    runtime failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _seed_flag(text: str):
    if text == "random":
        return "random"
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}")
    if not (0 <= value < 2**64):
        raise argparse.ArgumentTypeError("seed must be in [0, 2**64)")
    return value


def _engine(cfg: AppConfig) -> HideEngine:
    return HideEngine(recognizer=cfg.recognizer, strategy=cfg.strategy, policy=cfg.policy)


def _read_text_arg(args) -> str:
    if args.text is not None:
        return args.text
    return Path(args.infile).read_text(encoding="utf-8").rstrip("\n")


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _say(message: str) -> None:
    print(message, file=sys.stderr)


def _prompt(message: str) -> str:
    """input() with the prompt on stderr, keeping stdout machine-readable."""
    print(message, end="", file=sys.stderr, flush=True)
    return input()


# --------------------------------------------------------------------------
# interactive review


def review_spans(
    c: str, spans: list[EntitySpan], *, ask=_prompt, say=_say
) -> list[EntitySpan]:
    """One-shot terminal review of the recognized entity list.

    Per span: Enter/k keeps it, d drops it (the surface then stays visible in
    the outbound text), "r CODE" retypes it. Afterwards "SURFACE CODE" lines
    add manual entities at every token-bounded occurrence; a blank line (or
    EOF) finishes. Unrecognized answers keep the span, so a truncated script
    fails safe.
    """
    say("entity review: Enter=keep  d=drop  r CODE=retype")
    kept: list[EntitySpan] = []
    eof = False
    for span in spans:
        if eof:
            kept.append(span)
            continue
        say(f"  {span.surface!r}  {span.etype.code}  [{span.start},{span.end})")
        try:
            answer = ask("keep/drop/retype> ").strip()
        except EOFError:
            eof = True
            kept.append(span)
            continue
        if answer in ("", "k", "keep"):
            kept.append(span)
        elif answer in ("d", "drop"):
            continue
        elif answer.startswith("r"):
            code = answer[1:].strip()
            try:
                etype = EntityType.parse(code)
            except ValueError:
                say(f"unknown type code {code!r}; keeping {span.etype.code}")
                kept.append(span)
                continue
            kept.append(EntitySpan(span.start, span.end, span.surface, etype, source="manual"))
        else:
            say("unrecognized answer; keeping")
            kept.append(span)

    added: list[EntitySpan] = []
    if not eof:
        say("add entities as 'SURFACE CODE', blank line to finish")
        while True:
            try:
                line = ask("add> ").strip()
            except EOFError:
                break
            if not line:
                break
            parts = line.rsplit(None, 1)
            if len(parts) != 2:
                say("format: SURFACE CODE")
                continue
            surface, code = parts
            try:
                etype = EntityType.parse(code)
            except ValueError:
                say(f"unknown type code {code!r}")
                continue
            positions = iter_token_bounded(c, surface)
            if not positions:
                say("surface not found (token-bounded); ignored")
                continue
            for pos in positions:
                added.append(
                    EntitySpan(pos, pos + len(surface), surface, etype, source="manual")
                )
    non_overlapping: list[EntitySpan] = []
    for span in sorted(added, key=lambda s: (-(s.end - s.start), s.start)):
        if all(span.end <= o.start or span.start >= o.end for o in non_overlapping):
            non_overlapping.append(span)
    return merge_spans(kept, non_overlapping)


# --------------------------------------------------------------------------
# subcommands


def cmd_hide(args, cfg: AppConfig) -> int:
    text = _read_text_arg(args)
    doc = _engine(cfg).hide(text)
    if args.json:
        _emit(_json_dumps(doc.to_dict()), args.out)
    else:
        _emit(doc.anonymized, args.out)
    return 0


def cmd_seek(args, cfg: AppConfig) -> int:
    doc = AnonymizedDocument.from_dict(json.loads(Path(args.doc).read_text(encoding="utf-8")))
    output = _read_text_arg(args)
    result = seek(doc, output, cfg.seek_cfg)
    if args.json:
        _emit(_json_dumps(result.to_dict()), args.out)
    else:
        _emit(result.text, args.out)
    return 0


def cmd_run(args, cfg: AppConfig) -> int:
    text = _read_text_arg(args)
    backend = build_backend(cfg)
    span_filter = review_spans if args.review else None
    run = run_pipeline(
        text,
        _engine(cfg),
        backend,
        cfg.task,
        target_language=cfg.target_language,
        span_filter=span_filter,
        seek_cfg=cfg.seek_cfg,
    )
    if args.json:
        _emit(_json_dumps(run.record.to_dict()), args.out)
    else:
        _emit(run.record.d, args.out)
    return 0


def _load_eval_corpus(args, cfg: AppConfig):
    if args.corpus:
        return read_corpus(args.corpus)
    return synth_corpus(args.n_docs, seed=cfg.seed)


def _format_attack_report(report: ProtectionReport) -> str:
    lines = [
        "attack report",
        f"strategy:           {report.strategy}",
        f"attacker:           {report.attacker}",
        f"documents scored:   {report.n_docs} ({len(report.skipped)} skipped)",
        f"mean privacy score: {report.mean_privacy_score:.4f}",
        "histogram:",
    ]
    peak = max(report.histogram) or 1
    for bucket, count in zip(HISTOGRAM_BUCKETS, report.histogram):
        bar = "#" * round(40 * count / peak)
        lines.append(f"  {bucket:<10} {bar} {count}")
    return "\n".join(lines)


def cmd_attack(args, cfg: AppConfig) -> int:
    corpus = _load_eval_corpus(args, cfg)
    texts = [doc.text for doc in corpus]
    engine = _engine(cfg)
    if args.attacker == "identity":
        attacker = IdentityAttacker()
    elif args.attacker == "inversion":
        attacker = train_black_box(texts, engine)
    else:
        attacker = train_white_box(texts, engine)
    report = evaluate_protection(texts, engine, attacker, keep_per_doc=False)
    if args.json:
        _emit(_json_dumps(report.to_dict()), args.out)
    else:
        _emit(_format_attack_report(report), args.out)
    return 0


def cmd_eval(args, cfg: AppConfig) -> int:
    corpus = _load_eval_corpus(args, cfg)
    grid = run_eval_grid(corpus, seed=cfg.seed, seek_cfg=cfg.seek_cfg)
    if args.json:
        _emit(_json_dumps(grid.to_dict()), args.out)
    else:
        _emit(format_eval_table(grid), args.out)
    return 0


def cmd_synth(args, cfg: AppConfig) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    corpus = read_corpus(args.corpus) if args.corpus else synth_corpus(args.n_docs, seed=cfg.seed)
    texts = [doc.text for doc in corpus]
    write_corpus(out_dir / "corpus.jsonl", corpus)

    if args.hide_with == "local":
        substituter = MockSubstitute(HideEngine.build("generative", seed=cfg.seed))
    else:
        substituter = build_backend(cfg)
    hide_outcome = synth_hide_corpus(texts, substituter, cfg.recognizer)
    hide_train, hide_test = split_records(hide_outcome.records)
    write_jsonl(out_dir / "hide_train.jsonl", hide_train)
    write_jsonl(out_dir / "hide_test.jsonl", hide_test)
    write_templates(out_dir / "hide_train.txt", [render_hide_template(r) for r in hide_train])

    engine = _engine(cfg)
    pairs: list[tuple[str, str]] = []
    hide_failures = 0
    for c in texts:
        try:
            pairs.append((c, engine.hide(c).anonymized))
        except Exception:  # noqa: BLE001 - per-doc fault isolation
            hide_failures += 1
    seek_outcome = synth_seek_corpus(
        pairs, build_backend(cfg), cfg.task, target_language=cfg.target_language
    )
    seek_train, seek_test = split_records(seek_outcome.records)
    write_jsonl(out_dir / "seek_train.jsonl", seek_train)
    write_jsonl(out_dir / "seek_test.jsonl", seek_test)
    write_templates(out_dir / "seek_train.txt", [render_seek_template(r) for r in seek_train])

    summary = [
        f"corpus.jsonl      {len(corpus)} documents",
        f"hide_train.jsonl  {len(hide_train)} records",
        f"hide_test.jsonl   {len(hide_test)} records",
        f"seek_train.jsonl  {len(seek_train)} records",
        f"seek_test.jsonl   {len(seek_test)} records",
        f"skipped           {len(hide_outcome.skipped)} hide, "
        f"{len(seek_outcome.skipped) + hide_failures} seek",
    ]
    print(f"wrote {out_dir}:")
    print("\n".join(f"  {line}" for line in summary))
    return 0


def cmd_serve(args, cfg: AppConfig) -> int:
    from .gateway import run_gateway

    upstream = build_backend(cfg)
    gw = build_gateway_config(cfg, upstream)
    if args.host:
        gw = replace(gw, host=args.host)
    if args.port:
        gw = replace(gw, port=args.port)
    if args.transparent:
        gw = replace(gw, transparent=True)
    _say(f"gateway listening on {gw.host}:{gw.port} (strategy {gw.strategy.kind})")
    run_gateway(gw)
    return 0


# --------------------------------------------------------------------------
# parser assembly


def _add_common(sub) -> None:
    sub.add_argument("--config", metavar="PATH", default=None, help="YAML config file")
    sub.add_argument(
        "--seed",
        metavar="N",
        type=_seed_flag,
        default=None,
        help="integer seed, or 'random' for one drawn from system entropy (default 0)",
    )


def _add_input(sub) -> None:
    group = sub.add_mutually_exclusive_group(required=True)
    group.add_argument("--text", metavar="TEXT", default=None, help="input text inline")
    group.add_argument("--in", dest="infile", metavar="PATH", default=None, help="input text file")


def build_parser() -> _Parser:
    parser = _Parser(prog="hideseek", description=__doc__.splitlines()[0])
    subparsers = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p = subparsers.add_parser("hide", help="anonymize a text")
    _add_common(p)
    _add_input(p)
    p.add_argument("--strategy", choices=("label", "generative"), default=None)
    p.add_argument("--json", action="store_true", help="print the full document as JSON")
    p.add_argument("--out", metavar="PATH", default=None, help="write output to a file")
    p.set_defaults(func=cmd_hide)

    p = subparsers.add_parser("seek", help="restore originals in an LLM output")
    _add_common(p)
    p.add_argument("--doc", metavar="PATH", required=True, help="document JSON from hide --json")
    _add_input(p)
    p.add_argument("--json", action="store_true", help="print the seek result as JSON")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_seek)

    p = subparsers.add_parser("run", help="full pipeline against a backend")
    _add_common(p)
    _add_input(p)
    p.add_argument("--strategy", choices=("label", "generative"), default=None)
    p.add_argument(
        "--task", choices=("translate", "abstract", "polish", "classify"), default=None
    )
    p.add_argument("--backend", choices=("echo", "dict", "classify", "remote"), default=None)
    p.add_argument("--review", action="store_true", help="review the entity list interactively")
    p.add_argument("--json", action="store_true", help="print the full pipeline record as JSON")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_run)

    p = subparsers.add_parser("attack", help="score a hiding strategy against an attacker")
    _add_common(p)
    p.add_argument("--strategy", choices=("label", "generative"), default=None)
    p.add_argument(
        "--attacker", choices=("identity", "inversion", "informed"), default="inversion"
    )
    p.add_argument("--corpus", metavar="PATH", default=None, help="JSONL or plain-text corpus")
    p.add_argument("--n-docs", type=int, default=200, help="synthetic corpus size (no --corpus)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_attack)

    p = subparsers.add_parser("eval", help="protection-vs-budget grid")
    _add_common(p)
    p.add_argument("--corpus", metavar="PATH", default=None, help="JSONL or plain-text corpus")
    p.add_argument("--n-docs", type=int, default=100, help="synthetic corpus size (no --corpus)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", metavar="PATH", default=None)
    p.set_defaults(func=cmd_eval)

    p = subparsers.add_parser("synth", help="generate corpus and training files")
    _add_common(p)
    p.add_argument("--out", metavar="DIR", required=True, help="output directory")
    p.add_argument("--corpus", metavar="PATH", default=None, help="reuse an existing corpus")
    p.add_argument("--n-docs", type=int, default=200)
    p.add_argument("--strategy", choices=("label", "generative"), default=None)
    p.add_argument(
        "--task", choices=("translate", "abstract", "polish", "classify"), default=None
    )
    p.add_argument("--backend", choices=("echo", "dict", "classify", "remote"), default=None)
    p.add_argument(
        "--hide-with",
        choices=("local", "backend"),
        default="local",
        help="produce substituted texts locally (offline) or via --backend",
    )
    p.set_defaults(func=cmd_synth)

    p = subparsers.add_parser("serve", help="start the anonymizing proxy")
    _add_common(p)
    p.add_argument("--strategy", choices=("label", "generative"), default=None)
    p.add_argument("--backend", choices=("echo", "dict", "classify", "remote"), default=None)
    p.add_argument("--host", default=None)
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--transparent", action="store_true", help="forward without anonymizing")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.error("a subcommand is required")
    seed_flag = getattr(args, "seed", None)
    if seed_flag == "random":
        seed_flag = random.SystemRandom().getrandbits(63)
        _say(f"seed drawn from system entropy: {seed_flag}")
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(
            cfg,
            seed=seed_flag,
            strategy=getattr(args, "strategy", None),
            task=getattr(args, "task", None),
            backend=getattr(args, "backend", None),
        )
        return args.func(args, cfg)
    except ConfigError as exc:
        print(f"hideseek: config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - the exit-code contract
        print(f"hideseek: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
