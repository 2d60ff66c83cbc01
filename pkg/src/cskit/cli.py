"""Command-line entry point chaining the corpus and evaluation pipeline.

Every subcommand reads and writes only the documented JSONL/CSV formats,
exits 0 on success, and reports errors with the offending path or id.
All randomness flows from one seed, recorded in each artifact's
provenance header.
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

from . import __version__, io_utils
from .analysis import correlate
from .backtranslation import (
    INSTRUCTION_PRESETS,
    HttpBackend,
    MockBackend,
    OutputFilterConfig,
    PromptSpec,
    build_parallel_corpus,
    import_gold,
)
from .error_taxonomy import aggregate, error_subsets
from .errors import CskitError
from .ingest import RawCorpus, deduplicate, parse_conll
from .metrics import OneHotEmbeddingBackend, evaluate_systems
from .model import Split, SystemOutput, TagAliases
from .postprocess import truncate_output
from .preprocess import PreprocessConfig, preprocess_pipeline
from .service import DEFAULT_GUIDELINES, AnnotationService, make_server
from .tournament import assign as assign_comparisons
from .tournament import instance_scores, metric_tournament, schedule, score
from .train_export import (
    format_base,
    format_base_inference,
    format_instruct,
    format_instruct_inference,
)

METRIC_NAMES = ("bleu", "chrf", "embed_f")


def load_config(path: str | None) -> dict[str, str]:
    """Flat ``key = value`` file mirroring the long flag names."""
    if path is None:
        return {}
    config: dict[str, str] = {}
    for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise CskitError(f"{path}:{line_number}: expected 'key = value'")
        key, _, value = stripped.partition("=")
        config[key.strip().replace("-", "_")] = value.strip()
    return config


def resolve(args: argparse.Namespace, name: str, default=None, cast=str):
    """CLI flag, then config file, then the built-in default."""
    value = getattr(args, name, None)
    if value is not None:
        return value
    raw = args.config_values.get(name)
    if raw is not None:
        return cast(raw)
    return default


def _seed(args: argparse.Namespace) -> int:
    return resolve(args, "seed", default=0, cast=int)


# -- subcommand implementations ----------------------------------------------


def cmd_ingest(args: argparse.Namespace) -> int:
    aliases = TagAliases()
    splits = {}
    inputs = {}
    for split in Split:
        path = getattr(args, split.value)
        if path is None:
            continue
        content = Path(path).read_text(encoding="utf-8")
        splits[split] = tuple(parse_conll(content, split, aliases))
        inputs[split.value] = path
    if not splits:
        raise CskitError("provide at least one of --train/--dev/--test")
    corpus = RawCorpus(splits=splits)
    if not args.no_dedup:
        corpus = deduplicate(corpus)
    io_utils.write_jsonl(
        args.output,
        (io_utils.utterance_to_record(u) for u in corpus.all_utterances()),
        io_utils.make_provenance("ingest", _seed(args), inputs),
    )
    total = sum(corpus.size(split) for split in splits)
    print(f"ingest: wrote {total} utterances to {args.output}")
    return 0


def load_corpus(path: str) -> RawCorpus:
    utterances = [io_utils.record_to_utterance(r) for r in io_utils.read_jsonl(path)]
    splits: dict[Split, list] = {}
    for utterance in utterances:
        splits.setdefault(utterance.split, []).append(utterance)
    return RawCorpus(splits={s: tuple(us) for s, us in splits.items()})


def cmd_preprocess(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.input)
    config = PreprocessConfig(
        min_words_per_language=resolve(args, "min_words", default=2, cast=int)
    )
    sentences = preprocess_pipeline(corpus, config)
    io_utils.write_jsonl(
        args.output,
        (io_utils.sentence_to_record(s) for s in sentences),
        io_utils.make_provenance("preprocess", _seed(args), {"input": args.input}),
    )
    print(f"preprocess: kept {len(sentences)} sentences -> {args.output}")
    return 0


def cmd_backtranslate(args: argparse.Namespace) -> int:
    sentences = [io_utils.record_to_sentence(r) for r in io_utils.read_jsonl(args.input)]
    backend_name = resolve(args, "backend", default="mock")
    if backend_name == "mock":
        backend = MockBackend()
    elif backend_name == "http":
        endpoint = resolve(args, "endpoint")
        if not endpoint:
            raise CskitError("--endpoint is required with --backend http")
        backend = HttpBackend(
            endpoint=endpoint, timeout=resolve(args, "timeout", default=30.0, cast=float)
        )
    else:
        raise CskitError(f"unknown backend {backend_name!r}")

    preset = resolve(args, "prompt_preset", default="body")
    if preset not in INSTRUCTION_PRESETS:
        raise CskitError(f"unknown prompt preset {preset!r}")
    shots: tuple[tuple[str, str], ...] = ()
    if args.shots_file:
        shot_records = io_utils.read_jsonl(args.shots_file)
        shots = tuple((r["cs_text"], r["en_text"]) for r in shot_records)
    spec = PromptSpec(instruction=INSTRUCTION_PRESETS[preset], shots=shots)

    profanity: tuple[str, ...] = ()
    if args.profanity_file:
        profanity = tuple(
            w.strip()
            for w in Path(args.profanity_file).read_text(encoding="utf-8").splitlines()
            if w.strip()
        )
    config = OutputFilterConfig(profanity_list=profanity)

    pairs, discards = build_parallel_corpus(
        sentences,
        backend,
        spec,
        config,
        max_workers=resolve(args, "workers", default=1, cast=int),
    )
    inputs = {"input": args.input}
    if args.shots_file:
        inputs["shots"] = args.shots_file
    provenance = io_utils.make_provenance("backtranslate", _seed(args), inputs)
    provenance["backend"] = backend.identity
    provenance["prompt_preset"] = preset
    io_utils.write_jsonl(
        args.output, (io_utils.pair_to_record(p) for p in pairs), provenance
    )
    io_utils.write_jsonl(
        args.discards, (io_utils.discard_to_record(d) for d in discards), provenance
    )
    print(
        f"backtranslate: {len(pairs)} pairs, {len(discards)} discards "
        f"({backend.identity} backend) -> {args.output}"
    )
    return 0


def cmd_import_gold(args: argparse.Namespace) -> int:
    pairs = [io_utils.record_to_pair(r) for r in io_utils.read_jsonl(args.pairs)]
    edits = [io_utils.record_to_gold_edit(r) for r in io_utils.read_jsonl(args.edits)]
    merged = import_gold(pairs, edits)
    io_utils.write_jsonl(
        args.output,
        (io_utils.pair_to_record(p) for p in merged),
        io_utils.make_provenance(
            "import-gold", _seed(args), {"pairs": args.pairs, "edits": args.edits}
        ),
    )
    print(f"import-gold: {len(edits)} edits applied -> {args.output}")
    return 0


def cmd_export_train(args: argparse.Namespace) -> int:
    pairs = [io_utils.record_to_pair(r) for r in io_utils.read_jsonl(args.pairs)]
    if args.split:
        wanted = Split(args.split)
        pairs = [p for p in pairs if p.split is wanted]
    count = 0
    if args.format == "base":
        with open(args.output, "w", encoding="utf-8") as handle:
            for pair in pairs:
                record = (
                    format_base_inference(pair.en_text)
                    if args.inference
                    else format_base(pair)
                )
                handle.write(record + "\n")
                count += 1
    else:
        records = []
        for pair in pairs:
            triple = (
                format_instruct_inference(pair.en_text)
                if args.inference
                else format_instruct(pair)
            )
            records.append(
                {
                    "system": triple.system,
                    "user": triple.user,
                    "assistant": triple.assistant,
                }
            )
            count += 1
        io_utils.write_jsonl(
            args.output,
            records,
            io_utils.make_provenance("export-train", _seed(args), {"pairs": args.pairs}),
        )
    print(f"export-train: {count} {args.format} records -> {args.output}")
    return 0


def cmd_truncate(args: argparse.Namespace) -> int:
    outputs = [io_utils.record_to_output(r) for r in io_utils.read_jsonl(args.outputs)]
    pairs = {p.id: p for p in (io_utils.record_to_pair(r) for r in io_utils.read_jsonl(args.pairs))}
    truncated = []
    for output in outputs:
        pair = pairs.get(output.source_id)
        if pair is None:
            raise CskitError(f"{args.outputs}: no pair for source {output.source_id!r}")
        truncated.append(
            SystemOutput(
                source_id=output.source_id,
                system_id=output.system_id,
                raw=output.raw,
                truncated=truncate_output(output.raw, pair.en_text),
            )
        )
    io_utils.write_jsonl(
        args.output,
        (io_utils.output_to_record(o) for o in truncated),
        io_utils.make_provenance(
            "truncate", _seed(args), {"outputs": args.outputs, "pairs": args.pairs}
        ),
    )
    print(f"truncate: {len(truncated)} outputs -> {args.output}")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    outputs = [io_utils.record_to_output(r) for r in io_utils.read_jsonl(args.outputs)]
    pairs = [io_utils.record_to_pair(r) for r in io_utils.read_jsonl(args.pairs)]
    report = evaluate_systems(outputs, pairs, OneHotEmbeddingBackend())
    provenance = io_utils.make_provenance(
        "evaluate", _seed(args), {"outputs": args.outputs, "pairs": args.pairs}
    )
    io_utils.write_jsonl(
        args.instances,
        (io_utils.instance_metrics_to_record(m) for m in report.per_instance),
        provenance,
    )
    io_utils.write_csv(
        args.report,
        ("system", "bleu", "bertscore_like", "chrf"),
        io_utils.system_metrics_rows(report),
        provenance,
    )
    print(
        f"evaluate: {len(report.per_instance)} instances, "
        f"{len(report.per_system)} systems -> {args.report}"
    )
    return 0


def _texts_from_outputs(
    args: argparse.Namespace,
) -> tuple[dict[tuple[str, str], str], list[str], list[str]]:
    """(source, system) -> text map, plus sorted source and system ids."""
    outputs = [io_utils.record_to_output(r) for r in io_utils.read_jsonl(args.outputs)]
    texts = {(o.source_id, o.system_id): o.truncated for o in outputs}
    if args.reference_pairs:
        for record in io_utils.read_jsonl(args.reference_pairs):
            pair = io_utils.record_to_pair(record)
            texts[(pair.id, args.reference_system)] = pair.cs_text
    sources = sorted({source for source, _ in texts})
    systems = sorted({system for _, system in texts})
    # Keep only sources covered by every system, so every scheduled
    # comparison has both texts.
    covered = [s for s in sources if all((s, sys) in texts for sys in systems)]
    return texts, covered, systems


def cmd_schedule(args: argparse.Namespace) -> int:
    _, sources, systems = _texts_from_outputs(args)
    if args.sample_sources is not None and args.sample_sources < len(sources):
        rng = random.Random(_seed(args))
        sources = sorted(rng.sample(sources, args.sample_sources))
    comparisons = schedule(sources, systems)
    inputs = {"outputs": args.outputs}
    if args.reference_pairs:
        inputs["reference_pairs"] = args.reference_pairs
    io_utils.write_jsonl(
        args.output,
        (io_utils.comparison_to_record(c) for c in comparisons),
        io_utils.make_provenance("schedule", _seed(args), inputs),
    )
    print(
        f"schedule: {len(sources)} sources x {len(systems)} systems = "
        f"{len(comparisons)} comparisons -> {args.output}"
    )
    return 0


def cmd_assign(args: argparse.Namespace) -> int:
    comparisons = [
        io_utils.record_to_comparison(r) for r in io_utils.read_jsonl(args.comparisons)
    ]
    annotators = [a.strip() for a in args.annotators.split(",") if a.strip()]
    assignment = assign_comparisons(
        comparisons, annotators, args.per_annotator, _seed(args)
    )
    io_utils.write_jsonl(
        args.output,
        io_utils.assignment_to_records(assignment),
        io_utils.make_provenance("assign", _seed(args), {"comparisons": args.comparisons}),
    )
    print(
        f"assign: {len(comparisons)} comparisons across {len(annotators)} "
        f"annotators -> {args.output}"
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    comparisons = [
        io_utils.record_to_comparison(r) for r in io_utils.read_jsonl(args.comparisons)
    ]
    assignment = io_utils.records_to_assignment(io_utils.read_jsonl(args.assignment))
    texts, _, _ = _texts_from_outputs(args)
    guidelines = DEFAULT_GUIDELINES
    if args.guidelines_file:
        guidelines = Path(args.guidelines_file).read_text(encoding="utf-8")
    service = AnnotationService(
        comparisons=comparisons,
        assignment=assignment,
        texts=texts,
        log_path=args.log,
        seed=_seed(args),
        guidelines=guidelines,
    )
    server = make_server(
        service, port=resolve(args, "port", default=8000, cast=int), ui_dir=args.ui_dir
    )
    host, port = server.server_address[:2]
    # Flushed immediately: callers (and the UI integration test) watch
    # this line to learn the bound port before any request is made.
    print(
        f"serve: listening on http://{host}:{port} (judgment log: {args.log})",
        flush=True,
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
        service.close()
    return 0


def cmd_score(args: argparse.Namespace) -> int:
    comparisons = [
        io_utils.record_to_comparison(r) for r in io_utils.read_jsonl(args.comparisons)
    ]
    judgments = [
        io_utils.record_to_judgment(r) for r in io_utils.read_jsonl(args.judgments)
    ]
    table = score(judgments, comparisons)
    io_utils.write_csv(
        args.output,
        ("system", "points", "rank"),
        io_utils.score_rows(table),
        io_utils.make_provenance(
            "score",
            _seed(args),
            {"judgments": args.judgments, "comparisons": args.comparisons},
        ),
    )
    print(f"score: {len(judgments)} judgments -> {args.output}")
    return 0


def cmd_metric_tournament(args: argparse.Namespace) -> int:
    records = io_utils.read_jsonl(args.instances)
    metric = args.metric
    values = {
        (r["source_id"], r["system_id"]): float(r[metric]) for r in records
    }
    if args.comparisons:
        comparisons = [
            io_utils.record_to_comparison(r)
            for r in io_utils.read_jsonl(args.comparisons)
        ]
        sources = sorted({c.source_id for c in comparisons})
        systems = sorted({s for c in comparisons for s in c.systems()})
    else:
        sources = sorted({source for source, _ in values})
        systems = sorted({system for _, system in values})
    judgments = metric_tournament(
        values,
        sources,
        systems,
        tie_epsilon=resolve(args, "tie_epsilon", default=1e-9, cast=float),
        annotator_id=f"metric:{metric}",
    )
    io_utils.write_jsonl(
        args.output,
        (io_utils.judgment_to_record(j) for j in judgments),
        io_utils.make_provenance(
            "metric-tournament", _seed(args), {"instances": args.instances}
        ),
    )
    print(f"metric-tournament[{metric}]: {len(judgments)} judgments -> {args.output}")
    return 0


def cmd_correlate(args: argparse.Namespace) -> int:
    comparisons = [
        io_utils.record_to_comparison(r) for r in io_utils.read_jsonl(args.comparisons)
    ]
    judgments = [
        io_utils.record_to_judgment(r) for r in io_utils.read_jsonl(args.judgments)
    ]
    exclude = frozenset() if args.include_reference else frozenset({args.reference_system})
    human_scores = instance_scores(judgments, comparisons, exclude_systems=exclude)

    sources = sorted({c.source_id for c in comparisons})
    systems = sorted(
        {s for c in comparisons for s in c.systems()} - set(exclude)
    )
    tie_epsilon = resolve(args, "tie_epsilon", default=1e-9, cast=float)
    metric_records = io_utils.read_jsonl(args.instances)
    metric_comparisons = schedule(sources, systems)
    metric_scores = {}
    for metric in METRIC_NAMES:
        values = {
            (r["source_id"], r["system_id"]): float(r[metric]) for r in metric_records
        }
        metric_judgments = metric_tournament(
            values, sources, systems, tie_epsilon=tie_epsilon,
            annotator_id=f"metric:{metric}",
        )
        metric_scores[metric] = instance_scores(metric_judgments, metric_comparisons)

    subsets = None
    if args.annotations:
        annotations = [
            io_utils.record_to_annotation(r) for r in io_utils.read_jsonl(args.annotations)
        ]
        subsets = error_subsets(annotations)

    cells = correlate(human_scores, metric_scores, subsets)
    inputs = {
        "judgments": args.judgments,
        "comparisons": args.comparisons,
        "instances": args.instances,
    }
    if args.annotations:
        inputs["annotations"] = args.annotations
    provenance = io_utils.make_provenance("correlate", _seed(args), inputs)
    header, rows = io_utils.correlation_rows(cells)
    io_utils.write_csv(args.output, header, rows, provenance)
    if args.json_output:
        io_utils.write_jsonl(
            args.json_output, io_utils.correlation_cells_to_records(cells), provenance
        )
    print(f"correlate: {len(cells)} cells -> {args.output}")
    return 0


def cmd_error_report(args: argparse.Namespace) -> int:
    annotations = [
        io_utils.record_to_annotation(r) for r in io_utils.read_jsonl(args.annotations)
    ]
    profiles = aggregate(annotations)
    io_utils.write_csv(
        args.output,
        ("system", "group", "count", "share"),
        io_utils.error_report_rows(profiles),
        io_utils.make_provenance(
            "error-report", _seed(args), {"annotations": args.annotations}
        ),
    )
    print(f"error-report: {len(profiles)} systems -> {args.output}")
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cskit",
        description="Build code-switched parallel corpora and evaluate CS generation.",
    )
    parser.add_argument("--version", action="version", version=f"cskit {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="seed for every random choice")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common], help="parse token/tag files")
    p.add_argument("--train")
    p.add_argument("--dev")
    p.add_argument("--test")
    p.add_argument("--output", required=True)
    p.add_argument("--no-dedup", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("preprocess", parents=[common], help="clean and filter to CS sentences")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--min-words", type=int, dest="min_words")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("backtranslate", parents=[common], help="build silver pairs via a backend")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--discards", required=True)
    p.add_argument("--backend", choices=("mock", "http"))
    p.add_argument("--endpoint")
    p.add_argument("--prompt-preset", choices=tuple(INSTRUCTION_PRESETS), dest="prompt_preset")
    p.add_argument("--shots-file", dest="shots_file")
    p.add_argument("--profanity-file", dest="profanity_file")
    p.add_argument("--timeout", type=float)
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_backtranslate)

    p = sub.add_parser("import-gold", parents=[common], help="apply post-edition edits")
    p.add_argument("--pairs", required=True)
    p.add_argument("--edits", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_import_gold)

    p = sub.add_parser("export-train", parents=[common], help="emit fine-tuning data")
    p.add_argument("--pairs", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--format", choices=("base", "instruct"), required=True)
    p.add_argument("--split", choices=tuple(s.value for s in Split))
    p.add_argument("--inference", action="store_true")
    p.set_defaults(func=cmd_export_train)

    p = sub.add_parser("truncate", parents=[common], help="cut outputs at the best punctuation mark")
    p.add_argument("--outputs", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_truncate)

    p = sub.add_parser("evaluate", parents=[common], help="score outputs with BLEU/chrF/embed-F")
    p.add_argument("--outputs", required=True)
    p.add_argument("--pairs", required=True)
    p.add_argument("--instances", required=True)
    p.add_argument("--report", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("schedule", parents=[common], help="create pairwise comparisons")
    p.add_argument("--outputs", required=True)
    p.add_argument("--reference-pairs", dest="reference_pairs")
    p.add_argument("--reference-system", dest="reference_system", default="gold")
    p.add_argument("--sample-sources", dest="sample_sources", type=int)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("assign", parents=[common], help="partition comparisons across annotators")
    p.add_argument("--comparisons", required=True)
    p.add_argument("--annotators", required=True, help="comma-separated annotator tokens")
    p.add_argument("--per-annotator", dest="per_annotator", type=int, required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_assign)

    p = sub.add_parser("serve", parents=[common], help="run the annotation service")
    p.add_argument("--comparisons", required=True)
    p.add_argument("--assignment", required=True)
    p.add_argument("--outputs", required=True)
    p.add_argument("--reference-pairs", dest="reference_pairs")
    p.add_argument("--reference-system", dest="reference_system", default="gold")
    p.add_argument("--log", required=True)
    p.add_argument("--port", type=int)
    p.add_argument("--ui-dir", dest="ui_dir")
    p.add_argument("--guidelines-file", dest="guidelines_file")
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("score", parents=[common], help="score judgments into a leaderboard")
    p.add_argument("--judgments", required=True)
    p.add_argument("--comparisons", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("metric-tournament", parents=[common], help="simulate judging with a metric")
    p.add_argument("--instances", required=True)
    p.add_argument("--metric", choices=METRIC_NAMES, required=True)
    p.add_argument("--comparisons", help="restrict to an existing schedule")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_metric_tournament)

    p = sub.add_parser("correlate", parents=[common], help="human vs metric correlation matrix")
    p.add_argument("--judgments", required=True)
    p.add_argument("--comparisons", required=True)
    p.add_argument("--instances", required=True)
    p.add_argument("--annotations")
    p.add_argument("--reference-system", dest="reference_system", default="gold")
    p.add_argument("--include-reference", dest="include_reference", action="store_true")
    p.add_argument("--tie-epsilon", dest="tie_epsilon", type=float)
    p.add_argument("--output", required=True)
    p.add_argument("--json-output", dest="json_output")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("error-report", parents=[common], help="aggregate error annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_error_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.config_values = load_config(getattr(args, "config", None))
        return args.func(args)
    except CskitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: missing file: {exc.filename}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
