"""Command-line interface.

Each subcommand wraps one toolkit operation. Exit codes: 0 on success,
1 for data errors, 2 for usage and configuration errors (argparse uses
the same code on its own), 3 for I/O failures.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__, analysis, render
from .errors import (EXIT_DATA, EXIT_IO, EXIT_OK, EXIT_USAGE, ConfigError,
                     DataError, GenderscopeError)
from .gender import GENDERED, Gender, parse_gender
from .pipeline import RunConfig, prepare, run_pipeline
from .report import RunReport
from .stats import (BinomialModel, ContingencyTable, benjamini_hochberg,
                    binomial_tail, chi_square_2x2, chi_square_pvalue,
                    tally_union_bound)

FORMATS = ("tsv", "json", "markdown")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="genderscope",
        description="Detect gender-associated fields, topics and methods "
                    "in bibliographic corpora.",
    )
    parser.add_argument("--version", action="version", version=f"genderscope {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format(p):
        p.add_argument("--format", choices=FORMATS, default="tsv",
                       help="table output format (default tsv)")

    def add_config(p):
        p.add_argument("--config", required=True, help="run configuration INI")

    p = sub.add_parser("ingest", help="parse and validate export CSVs")
    p.add_argument("--corpus", action="append", required=True, dest="corpus")
    p.add_argument("--format-config", default=None)
    p.add_argument("--dedupe", action="store_true", help="merge per-field rows")
    p.add_argument("--lenient", action="store_true",
                   help="skip malformed rows instead of failing")
    p.add_argument("--report", default=None, help="write warnings/errors as JSON lines")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("gender", help="gender inference utilities")
    gsub = p.add_subparsers(dest="gender_command", required=True)
    gv = gsub.add_parser("validate", help="estimate correction factors from "
                                          "a manually coded sample")
    add_config(gv)
    gv.set_defaults(func=cmd_gender_validate)

    p = sub.add_parser("ratios", help="field participation ratios")
    add_config(p)
    add_format(p)
    p.set_defaults(func=cmd_ratios)

    p = sub.add_parser("terms", help="corpus-wide gendered term list")
    add_config(p)
    add_format(p)
    p.add_argument("--gender", required=True)
    p.set_defaults(func=cmd_terms)

    p = sub.add_parser("field-terms", help="top terms of one narrow field")
    add_config(p)
    add_format(p)
    p.add_argument("--field", required=True)
    p.set_defaults(func=cmd_field_terms)

    p = sub.add_parser("tally", help="terms recurring across fields' top lists")
    add_config(p)
    add_format(p)
    p.add_argument("--gender", default=None)
    p.add_argument("--min-fields", type=int, default=None)
    p.add_argument("--min-share", type=float, default=None)
    p.set_defaults(func=cmd_tally)

    p = sub.add_parser("kwic", help="sample keyword-in-context windows")
    add_config(p)
    add_format(p)
    p.add_argument("--term", required=True)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--gender", default=None)
    p.add_argument("--fields", default=None,
                   help="comma-separated narrow field codes to search in")
    p.set_defaults(func=cmd_kwic)

    p = sub.add_parser("cooccur", help="terms overrepresented alongside an anchor")
    add_config(p)
    add_format(p)
    p.add_argument("--term", required=True)
    p.add_argument("--baseline", choices=(analysis.BASELINE_ALL,
                                          analysis.BASELINE_SAME_GENDER),
                   default=analysis.BASELINE_ALL)
    p.add_argument("--gender", default=None)
    p.add_argument("--limit", type=int, default=50)
    p.set_defaults(func=cmd_cooccur)

    p = sub.add_parser("stats", help="statistical primitives")
    ssub = p.add_subparsers(dest="stats_command", required=True)

    sp = ssub.add_parser("chi2", help="2x2 chi-squared")
    for cell in "abcd":
        sp.add_argument(f"--{cell}", type=int, required=True)
    sp.add_argument("--policy", choices=("auto", "always", "never"), default="auto")
    sp.set_defaults(func=cmd_stats_chi2)

    sp = ssub.add_parser("pvalue", help="chi-squared upper tail, one df")
    sp.add_argument("--chi2", type=float, required=True)
    sp.set_defaults(func=cmd_stats_pvalue)

    sp = ssub.add_parser("bh", help="Benjamini-Hochberg selection")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", required=True, help="comma-separated p-values")
    sp.set_defaults(func=cmd_stats_bh)

    sp = ssub.add_parser("binomtail", help="binomial upper tail P(X >= t)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.set_defaults(func=cmd_stats_binomtail)

    sp = ssub.add_parser("unionbound", help="vocabulary-wide tally bound")
    sp.add_argument("--vocab", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--overlap", type=float, default=2.2)
    sp.add_argument("--adjusted", action="store_true")
    sp.set_defaults(func=cmd_stats_unionbound)

    p = sub.add_parser("run", help="run the full pipeline into a run directory")
    add_config(p)
    p.add_argument("--output-dir", default=None)
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("serve", help="serve a run directory over HTTP")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8570)
    p.add_argument("--cors-origin", action="append", default=None)
    p.add_argument("--ui-dir", default=None, help="static files to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def _load_config(args, **overrides) -> RunConfig:
    return RunConfig.load(args.config, **overrides)


def _emit_table(args, header, rows) -> None:
    sys.stdout.write(render.render_table(header, rows, args.format))


def _parse_cli_gender(raw: str | None) -> Gender | None:
    return parse_gender(raw) if raw else None


def cmd_ingest(args) -> int:
    from .ingest import FormatConfig, dedupe_articles, merge_corpora, parse_records

    report = RunReport()
    fmt = FormatConfig.load(args.format_config) if args.format_config else FormatConfig()
    corpora = [parse_records(path, fmt, report) for path in args.corpus]
    corpus = merge_corpora(corpora)
    deduped = dedupe_articles(corpus) if args.dedupe else None
    if args.report:
        report.write_jsonl(args.report)
    summary = {
        "rows": len(corpus),
        "row_errors": len(report.errors),
        "country_filtered": report.counters.get("country_filtered", 0),
    }
    if deduped is not None:
        summary["articles"] = len(deduped)
    print(json.dumps(summary, sort_keys=True))
    for event in report.errors:
        print(f"line {event.line}: {event.message}", file=sys.stderr)
    if report.has_errors and not args.lenient:
        return EXIT_DATA
    return EXIT_OK


def cmd_gender_validate(args) -> int:
    config = _load_config(args)
    if not config.validation_path:
        raise ConfigError("the run configuration names no validation sample")
    state = prepare(config)
    f = state.factors
    print(f"male_multiplier={f.male_multiplier:.3f} "
          f"female_multiplier={f.female_multiplier:.3f}")
    print(f"manual: male={f.manual_male} female={f.manual_female}  "
          f"auto: male={f.auto_male} female={f.auto_female}")
    return EXIT_OK


def cmd_ratios(args) -> int:
    config = _load_config(args)
    state = prepare(config)
    participation = analysis.field_participation(
        state.corpus, state.labels, state.factors, state.catalog, state.kept)
    _emit_table(args, *render.field_ratio_table(participation))
    return EXIT_OK


def cmd_terms(args) -> int:
    config = _load_config(args)
    gender = parse_gender(args.gender)
    state = prepare(config)
    lst = analysis.overall_gendered_terms(
        state.index, gender, top_n=config.top_n, rank_n=config.rank_n,
        alpha=config.alpha, policy=config.policy)
    _emit_table(args, *render.overall_terms_table(lst, state.overall_fm))
    return EXIT_OK


def cmd_field_terms(args) -> int:
    config = _load_config(args)
    state = prepare(config)
    lists = analysis.per_field_top_terms(state.index, args.field,
                                         k=config.top_k, policy=config.policy)
    _emit_table(args, *render.field_terms_table(lists))
    return EXIT_OK


def cmd_tally(args) -> int:
    overrides = {}
    if args.min_fields is not None:
        overrides["min_fields"] = args.min_fields
    if args.min_share is not None:
        overrides["min_share"] = args.min_share
    config = _load_config(args, **overrides)
    state = prepare(config)
    per_field = {}
    for code in state.kept:
        try:
            per_field[code] = analysis.per_field_top_terms(
                state.index, code, k=config.top_k, policy=config.policy)
        except DataError:
            continue
    if not per_field:
        raise DataError("no field could be analyzed")
    tally = analysis.cross_field_tally(
        per_field, state.index.doc_frequencies(),
        min_fields=config.min_fields, min_share=config.min_share,
        overlap=state.overlap)
    genders = [parse_gender(args.gender)] if args.gender else list(GENDERED)
    for gender in genders:
        _emit_table(args, *render.crossfield_table(tally, gender))
    return EXIT_OK


def cmd_kwic(args) -> int:
    config = _load_config(args)
    state = prepare(config)
    fields = None
    if args.fields:
        fields = {c.strip() for c in args.fields.split(",") if c.strip()}
    samples = analysis.kwic_sample(
        state.index, state.deduped, args.term,
        n=args.n if args.n is not None else config.kwic_n,
        fields=fields, gender=_parse_cli_gender(args.gender),
        seed=args.seed if args.seed is not None else config.seed)
    _emit_table(args, *render.kwic_table(samples))
    return EXIT_OK


def cmd_cooccur(args) -> int:
    config = _load_config(args)
    state = prepare(config)
    result = analysis.cooccurrence_scan(
        state.index, args.term, baseline=args.baseline,
        gender=_parse_cli_gender(args.gender), policy=config.policy,
        limit=args.limit)
    _emit_table(args, *render.cooccurrence_table(result))
    return EXIT_OK


def cmd_stats_chi2(args) -> int:
    table = ContingencyTable(args.a, args.b, args.c, args.d)
    score = chi_square_2x2(table, args.policy)
    print(f"chi2={render.fmt_chi2(score.chi2)} p={render.fmt_p(score.p_value)} "
          f"direction={score.direction.value} "
          f"corrected={'yes' if score.correction_applied else 'no'}")
    return EXIT_OK


def cmd_stats_pvalue(args) -> int:
    print(f"{chi_square_pvalue(args.chi2):.6g}")
    return EXIT_OK


def cmd_stats_bh(args) -> int:
    try:
        p_values = [float(x) for x in args.p.split(",") if x.strip()]
    except ValueError:
        raise ConfigError(f"bad p-value list {args.p!r}") from None
    selected = benjamini_hochberg(p_values, args.alpha)
    print(json.dumps({"selected_indices": selected,
                      "selected": [p_values[i] for i in selected]}))
    return EXIT_OK


def cmd_stats_binomtail(args) -> int:
    print(f"{binomial_tail(args.n, args.p, args.t):.6g}")
    return EXIT_OK


def cmd_stats_unionbound(args) -> int:
    model = BinomialModel(n=args.n, p=args.p, t=args.t,
                          vocab_size=args.vocab, overlap=args.overlap)
    print(f"{tally_union_bound(model, adjusted=args.adjusted):.6g}")
    return EXIT_OK


def cmd_run(args) -> int:
    overrides = {}
    if args.output_dir is not None:
        overrides["output_dir"] = args.output_dir
    if args.lenient:
        overrides["lenient"] = True
    config = _load_config(args, **overrides)
    result = run_pipeline(config)
    print(f"run {result.run_id} written to {result.run_dir}")
    for event in result.report.events:
        print(f"{event.level}: [{event.stage}] {event.message}", file=sys.stderr)
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.run_dir, cors_origins=args.cors_origin,
                     ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except GenderscopeError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
