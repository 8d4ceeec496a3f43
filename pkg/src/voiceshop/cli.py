"""Command-line entry points: eval, serve, replay.

Exit codes: 0 success, 1 unexpected runtime failure, 2 usage or input-schema
problems (argparse keeps its own exit code 2 for flag errors, which matches).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import engine as engine_mod
from . import paths, srseval
from .command import load_grammar
from .errors import SchemaError, UndefinedMetricError, VoiceShopError
from .provider import load_script
from .shop import DEFAULT_PAGE_SIZE, load_catalog

log = logging.getLogger("voiceshop")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voiceshop",
        description="Voice-commanded shop engine and speech-recognition scorer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser(
        "eval", help="score hypothesis transcripts against a reference corpus"
    )
    p_eval.add_argument("--ref", required=True, help="reference corpus file")
    p_eval.add_argument(
        "--hyp",
        required=True,
        action="append",
        help="hypothesis corpus file; repeat to compare several systems",
    )
    p_eval.add_argument(
        "--json", action="store_true", help="emit structured records instead of a table"
    )
    p_eval.add_argument(
        "--per-utterance", action="store_true", help="include per-utterance scores"
    )

    p_serve = sub.add_parser("serve", help="run the shop service")
    p_serve.add_argument("--catalog", default=None, help="catalog JSON path")
    p_serve.add_argument("--grammar", default=None, help="grammar JSON path")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument(
        "--partial-policy", choices=("final_only", "eager"), default="final_only"
    )

    p_replay = sub.add_parser(
        "replay", help="feed a scripted voice session through the pipeline"
    )
    p_replay.add_argument("--script", required=True, help="JSONL transcript script")
    p_replay.add_argument("--catalog", default=None)
    p_replay.add_argument("--grammar", default=None)
    p_replay.add_argument(
        "--partial-policy", choices=("final_only", "eager"), default="final_only"
    )

    return parser


def _resolve(flag_value: str | None, env_var: str, default: Path) -> Path:
    if flag_value:
        return Path(flag_value)
    env = os.environ.get(env_var)
    if env:
        return Path(env)
    return default


def _system_names(hyp_args: list[str]) -> list[str]:
    stems = [Path(h).stem for h in hyp_args]
    if len(set(stems)) == len(stems):
        return stems
    return list(hyp_args)


def _cmd_eval(args) -> int:
    reports = {}
    for name, hyp in zip(_system_names(args.hyp), args.hyp):
        pairs = srseval.pair_corpus_files(args.ref, hyp)
        reports[name] = srseval.corpus_report(pairs)

    if len(reports) == 1:
        report = next(iter(reports.values()))
        if args.json:
            print(srseval.report_to_json(report, per_utterance=args.per_utterance))
        else:
            print(srseval.render_report(report))
            if args.per_utterance:
                for utt in report.utterances:
                    print(
                        f"{utt.id}  wer {srseval.fmt_percent(srseval.wer(utt.alignment))}"
                        f"  sub {utt.alignment.substitutions}"
                        f"  del {utt.alignment.deletions}"
                        f"  ins {utt.alignment.insertions}"
                        f"  cor {utt.alignment.correct}"
                    )
        return 0

    if args.json:
        doc = {
            name: json.loads(
                srseval.report_to_json(report, per_utterance=args.per_utterance)
            )
            for name, report in reports.items()
        }
        print(json.dumps(doc, sort_keys=True, indent=2))
    else:
        print(srseval.render_comparison(reports))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    catalog = load_catalog(_resolve(args.catalog, "VOICESHOP_CATALOG", paths.default_catalog_path()))
    grammar = load_grammar(_resolve(args.grammar, "VOICESHOP_GRAMMAR", paths.default_grammar_path()))
    engine = engine_mod.SessionEngine(
        grammar, catalog, page_size=DEFAULT_PAGE_SIZE, partial_policy=args.partial_policy
    )
    logging.basicConfig(level=logging.INFO, format="%(name)s %(levelname)s %(message)s")
    log.info(
        "grammar loaded: %d intents, vocab_class=%s, mode=%s",
        len(grammar.intents), grammar.vocab_class, grammar.mode,
    )
    log.info("catalog loaded: %d products", len(catalog))
    uvicorn.run(create_app(engine), host=args.host, port=args.port, log_level="info")
    return 0


def _cmd_replay(args) -> int:
    script = load_script(args.script)
    catalog = load_catalog(_resolve(args.catalog, "VOICESHOP_CATALOG", paths.default_catalog_path()))
    grammar = load_grammar(_resolve(args.grammar, "VOICESHOP_GRAMMAR", paths.default_grammar_path()))
    for record in engine_mod.replay(
        script, grammar, catalog, partial_policy=args.partial_policy
    ):
        print(json.dumps(record, sort_keys=True))
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {"eval": _cmd_eval, "serve": _cmd_serve, "replay": _cmd_replay}
    try:
        return handlers[args.command](args)
    except (SchemaError, UndefinedMetricError) as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VoiceShopError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 1


if __name__ == "__main__":
    sys.exit(main())
