"""Command-line interface.

Exit codes: 0 success, 2 malformed input or bad options, 3 model error.
"""
from __future__ import annotations

import argparse
import contextlib
import json
import logging
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor
from itertools import islice

from . import __version__, synth
from .aggregate import water_fill
from .core import MAX_LEN, Counters
from .errors import ConfigError, DataError, FormatError, MilieError, ModelError
from .evaluation import (LEXICAL_LABEL, METRICS, compare_pathways, entropy_profile, format_entropy_table,
                         format_entropy_tsv, format_table, format_tsv, score_benchie, score_carb, score_lexical)
from .formats import (SCHEMA_VERSIONS, dumps, gold_from_json, gold_to_json, prior_from_json, read_jsonl,
                      sentence_from_json, synset_from_json, synsets_from_gold, triple_from_json, triple_to_json)
from .pathway import PATHWAYS, DecodeLimits, Pathway, extract_all
from .postprocess import binarize, complete_many
from .tagger import FORMAT_VERSION, TrainConfig, TrainingInstance, load_file, oracle_from_gold, save, train
from .traindata import SamplerConfig, instances

log = logging.getLogger("milie")

EXIT_OK, EXIT_INPUT, EXIT_MODEL = 0, 2, 3


class UsageError(MilieError):
    pass


# -- I/O helpers -------------------------------------------------------------

def _open_in(path):
    if path == "-":
        return contextlib.nullcontext(sys.stdin)
    try:
        return open(path, encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


@contextlib.contextmanager
def _atomic_out(path, binary=False):
    """Write to a temporary file and move it into place only on success."""
    if path == "-":
        yield sys.stdout.buffer if binary else sys.stdout
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".milie-")
    try:
        with os.fdopen(fd, "wb" if binary else "w", **({} if binary else {"encoding": "utf-8"})) as f:
            yield f
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        raise


def _records(obj, max_len):
    """Sentence records, or gold records whose sentence is used."""
    if isinstance(obj, dict) and "sentence" in obj:
        return sentence_from_json(obj["sentence"], max_len)
    return sentence_from_json(obj, max_len)


def _load_model(path):
    try:
        return load_file(path)
    except OSError as exc:
        raise ModelError(f"cannot read model {path}: {exc.strerror}") from None
    except FormatError as exc:
        raise ModelError(str(exc)) from None


def _parse_pathways(value):
    if value.lower() == "all":
        return PATHWAYS
    try:
        return tuple(Pathway.parse(v) for v in value.split(","))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _limits(args):
    try:
        return DecodeLimits(args.max_branch, args.max_triples, args.max_len)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None


def _chunked_map(fn, items, jobs, chunk=64):
    """``map`` that keeps input order and only holds one chunk in memory."""
    items = iter(items)
    if jobs <= 1:
        for item in items:
            yield fn(item)
        return
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        while True:
            block = list(islice(items, chunk * jobs))
            if not block:
                return
            yield from pool.map(fn, block)


def _report_diagnostics(name, diag):
    if diag.values:
        log.info("%s diagnostics: %s", name, json.dumps(diag.as_dict(), sort_keys=True))


# -- commands ----------------------------------------------------------------

def cmd_synth(args):
    records = synth.corpus(args.n, seed=args.seed, templates=args.templates, prefix=args.prefix)
    with _atomic_out(args.output) as out:
        for rec in records:
            out.write(dumps(gold_to_json(rec)) + "\n")
    return EXIT_OK


def cmd_traindata(args):
    try:
        config = SamplerConfig(args.seed, args.negatives_per_instance, args.negative_fraction, args.max_len)
    except ConfigError as exc:
        raise UsageError(str(exc)) from None
    diag = Counters()
    with _open_in(args.gold) as src, _atomic_out(args.output) as out:
        for rec in read_jsonl(src, lambda o: gold_from_json(o, args.max_len)):
            for inst in instances(rec, config, diag):
                out.write(dumps(inst.to_json()) + "\n")
    _report_diagnostics("traindata", diag)
    return EXIT_OK


def cmd_train(args):
    config = TrainConfig(seed=args.seed, epochs=args.epochs, learning_rate=args.learning_rate,
                         negative_weight=args.negative_weight, hidden=args.hidden, batch_size=args.batch_size)
    with _open_in(args.instances) as src:
        model = train(read_jsonl(src, TrainingInstance.from_json), config)
    with _atomic_out(args.output, binary=True) as out:
        out.write(save(model))
    return EXIT_OK


def cmd_oracle(args):
    with _open_in(args.gold) as src:
        model = oracle_from_gold(list(read_jsonl(src, lambda o: gold_from_json(o, args.max_len))))
    with _atomic_out(args.output, binary=True) as out:
        out.write(save(model))
    return EXIT_OK


def cmd_extract(args):
    model = _load_model(args.model)
    pathways = _parse_pathways(args.pathways)
    limits = _limits(args)
    diag = Counters()

    def run(sentence):
        local = Counters()
        results = extract_all(sentence, model, limits, pathways=pathways, diagnostics=local)
        if args.aggregate == "wf":
            triples = [(None, t) for t in water_fill(results, min_votes=args.min_votes)]
        else:
            triples = [(p, t) for p, ts in results.items() for t in ts]
        if args.binarize:
            triples = [(p, b) for p, t in triples for b in binarize(t, sentence, model, limits, local)]
        return triples, local

    with _open_in(args.sentences) as src, _atomic_out(args.output) as out:
        sentences = read_jsonl(src, lambda o: _records(o, args.max_len))
        for triples, local in _chunked_map(run, sentences, args.jobs):
            diag.update(local)
            for p, t in triples:
                rec = triple_to_json(t)
                if p is not None and len(pathways) > 1:
                    rec["pathway"] = p.name
                out.write(dumps(rec) + "\n")
    _report_diagnostics("extract", diag)
    return EXIT_OK


def cmd_complete(args):
    model = _load_model(args.model)
    limits = _limits(args)
    with _open_in(args.priors) as src:
        priors = {}
        for rec in read_jsonl(src, prior_from_json):
            priors.setdefault(rec.sentence_id, []).append(rec)
    diag = Counters()

    def run(sentence):
        local = Counters()
        return complete_many(sentence, priors.get(sentence.id, []), model, limits, local), local

    with _open_in(args.sentences) as src, _atomic_out(args.output) as out:
        sentences = read_jsonl(src, lambda o: _records(o, args.max_len))
        for triples, local in _chunked_map(run, sentences, args.jobs):
            diag.update(local)
            for t in triples:
                out.write(dumps(triple_to_json(t)) + "\n")
    if diag["priors_unaligned"]:
        log.warning("%d prior(s) could not be aligned to sentence tokens and were skipped",
                    diag["priors_unaligned"])
    _report_diagnostics("complete", diag)
    return EXIT_OK


def _read_gold_any(path, max_len):
    """Gold records and/or fact synsets from one JSONL file (kind detected per line)."""
    records, synsets = [], []

    def decode(obj):
        if isinstance(obj, dict) and "facts" in obj:
            synsets.extend(synset_from_json(obj))
        else:
            records.append(gold_from_json(obj, max_len))

    with _open_in(path) as src:
        for _ in read_jsonl(src, decode):
            pass
    return records, synsets


def _write_report(rows, args, title):
    fmt = args.format
    with _atomic_out(args.output) as out:
        if fmt == "json":
            if len(rows) == 1:
                out.write(rows[0][1].to_json() + "\n")
            else:
                out.write(json.dumps({label: r.to_dict() for label, r in rows}, sort_keys=True) + "\n")
        elif fmt == "tsv":
            out.write(format_tsv(rows))
        else:
            out.write(format_table(rows, title))
    if args.figure:
        from .plotting import plot_scores
        plot_scores(rows, args.figure, title=title)


def cmd_score(args):
    records, synsets = _read_gold_any(args.gold, args.max_len)
    sentences = {r.id: r.sentence for r in records}
    if args.sentences:
        with _open_in(args.sentences) as src:
            for s in read_jsonl(src, lambda o: _records(o, args.max_len)):
                sentences[s.id] = s
    with _open_in(args.preds) as src:
        preds = list(read_jsonl(src, triple_from_json))
    missing = sorted({t.sentence_id for t in preds} - set(sentences))
    if missing:
        raise FormatError(f"predictions reference unknown sentences: {', '.join(missing[:5])}")

    if args.metric == "benchie":
        gold = synsets or [fs for r in records for fs in synsets_from_gold(r)]
        report = score_benchie(preds, gold, sentences)
        label = "BenchIE"
    else:
        if not records:
            raise FormatError(f"{args.metric} scoring needs gold records with spans")
        gold = [t for r in records for t in r.triples]
        if args.metric == "carb":
            report, label = score_carb(preds, gold), "CaRB-style"
        else:
            report, label = score_lexical(preds, gold, sentences), LEXICAL_LABEL
    _write_report([(label, report)], args, args.metric)
    return EXIT_OK


def cmd_compare(args):
    model = _load_model(args.model)
    records, synsets = _read_gold_any(args.gold, args.max_len)
    rows = compare_pathways(records, model, args.metric, _limits(args), args.binarize, synsets or None, args.jobs)
    _write_report(rows, args, args.metric)
    return EXIT_OK


def cmd_entropy(args):
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    with _open_in(args.gold) as src:
        records = list(read_jsonl(src, lambda o: gold_from_json(o, args.max_len)))
    try:
        profile = entropy_profile(records, families)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    with _atomic_out(args.output) as out:
        if args.format == "json":
            out.write(json.dumps({f"{k.name.lower()}/{fam}": h for (k, fam), h in profile.items()},
                                 sort_keys=True) + "\n")
        elif args.format == "tsv":
            out.write(format_entropy_tsv(profile))
        else:
            out.write(format_entropy_table(profile))
    if args.figure:
        from .plotting import plot_entropy
        plot_entropy(profile, args.figure)
    return EXIT_OK


# -- parser ------------------------------------------------------------------

def _version_text():
    lines = [f"milie {__version__}", f"model-format {FORMAT_VERSION}"]
    lines += [f"{name} {v}" for name, v in sorted(SCHEMA_VERSIONS.items())]
    return "\n".join(lines)


def build_parser():
    parser = argparse.ArgumentParser(prog="milie", description="Iterative conditioned open information extraction.",
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=_version_text())
    parser.add_argument("--config", help="key = value file; command-line flags take precedence")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, out_help="output file ('-' for stdout)"):
        p.add_argument("-o", "--output", default="-", help=out_help)
        p.add_argument("--max-len", type=int, default=MAX_LEN)
        return p

    def decoding(p):
        p.add_argument("--max-branch", type=int, default=8)
        p.add_argument("--max-triples", type=int, default=64)
        p.add_argument("--jobs", type=int, default=1)

    p = common(sub.add_parser("synth", help="write a templated synthetic gold corpus"))
    p.add_argument("n", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--prefix", default="syn")
    p.add_argument("--templates", nargs="*", choices=sorted(synth.TEMPLATES))
    p.set_defaults(func=cmd_synth)

    p = common(sub.add_parser("traindata", help="gold records -> training instances"))
    p.add_argument("gold")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--negatives-per-instance", type=int, default=2)
    p.add_argument("--negative-fraction", type=float, default=1.0)
    p.set_defaults(func=cmd_traindata)

    p = common(sub.add_parser("train", help="train the window tagger on training instances"))
    p.add_argument("instances")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epochs", type=int, default=TrainConfig.epochs)
    p.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--negative-weight", type=float, default=TrainConfig.negative_weight)
    p.add_argument("--hidden", type=int, default=TrainConfig.hidden)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.set_defaults(func=cmd_train)

    p = common(sub.add_parser("oracle", help="build an oracle tagger model from gold records"))
    p.add_argument("gold")
    p.set_defaults(func=cmd_oracle)

    p = common(sub.add_parser("extract", help="extract triples from sentences"))
    p.add_argument("sentences")
    p.add_argument("--model", required=True)
    p.add_argument("--pathways", default="all", help="'all' or a comma list such as PSOA,OSPA")
    p.add_argument("--aggregate", choices=("wf", "none"), default="wf")
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--min-votes", type=int, default=1)
    decoding(p)
    p.set_defaults(func=cmd_extract)

    p = common(sub.add_parser("complete", help="complete partial extractions from another system"))
    p.add_argument("sentences")
    p.add_argument("priors")
    p.add_argument("--model", required=True)
    decoding(p)
    p.set_defaults(func=cmd_complete)

    p = common(sub.add_parser("score", help="score predictions against gold"))
    p.add_argument("preds")
    p.add_argument("gold", help="gold records JSONL, or fact synsets JSONL for benchie")
    p.add_argument("--metric", choices=METRICS, default="benchie")
    p.add_argument("--sentences", help="sentence JSONL, needed when gold holds only fact synsets")
    p.add_argument("--format", choices=("json", "text", "tsv"), default="json")
    p.add_argument("--figure", help="also render a bar chart to this image file")
    p.set_defaults(func=cmd_score)

    p = common(sub.add_parser("compare", help="score every pathway and the water-filled aggregate"))
    p.add_argument("gold")
    p.add_argument("--model", required=True)
    p.add_argument("--metric", choices=METRICS, default="benchie")
    p.add_argument("--binarize", action="store_true")
    p.add_argument("--format", choices=("json", "text", "tsv"), default="text")
    p.add_argument("--figure")
    decoding(p)
    p.set_defaults(func=cmd_compare)

    p = common(sub.add_parser("entropy", help="tag entropy of gold subject/predicate/object spans"))
    p.add_argument("gold")
    p.add_argument("--families", default="dep,pos")
    p.add_argument("--format", choices=("json", "text", "tsv"), default="text")
    p.add_argument("--figure")
    p.set_defaults(func=cmd_entropy)
    return parser


def read_config(path) -> dict:
    values = {}
    with _open_in(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key = value")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value.strip("\"'")
    return values


def _apply_config(parser, argv, config):
    """Re-parse with config values as defaults, so explicit flags still win."""
    ns = parser.parse_args(argv)
    sub = parser._subparsers._group_actions[0].choices[ns.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, value in config.items():
        action = actions.get(key)
        if action is None or not action.option_strings:
            raise UsageError(f"config key {key!r} is not an option of {ns.command}")
        if action.nargs == 0:
            value = value.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(value)
            except ValueError:
                raise UsageError(f"config key {key!r}: bad value {value!r}") from None
        defaults[key] = value
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        if args.config:
            args = _apply_config(parser, argv, read_config(args.config))
        return args.func(args)
    except ModelError as exc:
        print(f"milie {args.command}: model error: {exc}", file=sys.stderr)
        return EXIT_MODEL
    except (FormatError, DataError, ConfigError, UsageError) as exc:
        print(f"milie {args.command}: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
