"""Command-line surface for the pipeline.

One subcommand per stage, so the expensive stages (encoder training,
corpus embedding) produce on-disk artifacts that later stages and
repeated experiments reuse.  Artifacts never mutate their inputs, and
every produced artifact embeds the configuration hash and the version
of the producing stage.  Errors print a single machine-parseable JSON
line on stderr: usage errors exit 2, domain errors exit 1.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .ablation import AblationSpec, run_ablation
from .config import RunConfig, load_run_config
from .corpus import (
    LabelCatalog,
    chronological_split,
    encode_labels,
    load_corpus,
)
from .encoder import embed_corpus, load_encoder, save_encoder, train_encoder
from .errors import CaselineError, ConfigError, MalformedRecordError
from .metrics import MetricsReport, compute_report, format_report_table
from .model import (
    evaluate_split,
    load_model,
    prediction_record,
    predict_with_evidence,
    save_model,
    train,
)
from .store import EmbeddingStore
from .summarizer import summarize_corpus
from .synthetic import DriftCorpusConfig, generate_drift_corpus, \
    synthetic_catalog

log = logging.getLogger(__name__)

STAGE_VERSION = 1

__all__ = ["main"]


def _canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _config_from(args: argparse.Namespace) -> RunConfig:
    overrides = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return load_run_config(args.config, overrides)


def _catalog_from(args: argparse.Namespace) -> LabelCatalog:
    if getattr(args, "labels_file", None):
        return LabelCatalog.from_file(args.labels_file)
    return LabelCatalog.default()


def _provenance(cfg: RunConfig, stage: str) -> dict:
    return {"config_hash": cfg.config_hash(), "stage": stage,
            "stage_version": STAGE_VERSION, "tool_version": __version__}


def _write_sidecar(path: Path, cfg: RunConfig, stage: str) -> None:
    sidecar = path.with_name(path.name + ".meta.json")
    sidecar.write_text(_canonical_json(_provenance(cfg, stage)) + "\n",
                       encoding="utf-8")


# ---------------------------------------------------------------- index

def save_index(path: str | Path, store: EmbeddingStore,
               labels: np.ndarray, catalog: LabelCatalog,
               provenance: dict) -> None:
    """Bundle embeddings, aligned label vectors, and the label names
    into one retrieval-ready artifact."""
    meta = dict(provenance)
    meta.update({"format_version": 1, "kind": "index"})
    np.savez(path,
             matrix=store.matrix,
             case_ids=np.array(store.case_ids),
             labels=labels.astype(np.uint8),
             label_names=np.array(list(catalog.names)),
             meta=np.frombuffer(
                 _canonical_json(meta).encode(), dtype=np.uint8).copy())


def load_index(path: str | Path
               ) -> tuple[EmbeddingStore, np.ndarray, LabelCatalog, dict]:
    with np.load(path) as data:
        meta = json.loads(bytes(data["meta"]).decode())
        if meta.get("kind") != "index":
            raise ConfigError(f"{path} is not an index bundle")
        store = EmbeddingStore([str(c) for c in data["case_ids"]],
                               data["matrix"].astype(np.float64))
        labels = data["labels"].astype(np.uint8)
        catalog = LabelCatalog([str(n) for n in data["label_names"]])
    if labels.shape[0] != len(store.case_ids):
        raise MalformedRecordError(
            f"{path}: {labels.shape[0]} label rows for "
            f"{len(store.case_ids)} embeddings")
    return store, labels, catalog, meta


# ----------------------------------------------------------- subcommands

def cmd_ingest(args: argparse.Namespace) -> int:
    catalog = _catalog_from(args)
    corpus = load_corpus(args.input, catalog)
    corpus.save_jsonl(args.output)
    print(f"ingested {len(corpus)} cases -> {args.output}")
    return 0


def cmd_summarize(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    catalog = _catalog_from(args)
    corpus = load_corpus(args.input, catalog)
    summarized = summarize_corpus(corpus, cfg.summarizer_config())
    summarized.save_jsonl(args.output)
    print(f"summarized {len(summarized)} cases -> {args.output}")
    return 0


def cmd_train_encoder(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    catalog = _catalog_from(args)
    corpus = load_corpus(args.corpus, catalog)
    splits = chronological_split(corpus, *cfg.split_sizes(len(corpus)))
    enc = train_encoder(splits.train, cfg.encoder_config())
    save_encoder(enc, args.output,
                 config_echo={**_provenance(cfg, "train-encoder"),
                              "config_text": cfg.to_text()})
    print(f"trained encoder on {splits.n_train} cases -> {args.output}")
    return 0


def cmd_embed(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    catalog = _catalog_from(args)
    corpus = load_corpus(args.corpus, catalog)
    enc, _ = load_encoder(args.encoder)
    store = embed_corpus(corpus, enc)
    store.save(args.output)
    _write_sidecar(Path(args.output), cfg, "embed")
    print(f"embedded {len(store)} cases -> {args.output}")
    return 0


def cmd_index(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    catalog = _catalog_from(args)
    corpus = load_corpus(args.corpus, catalog)
    store = EmbeddingStore.load(args.embeddings)
    store.check_alignment(corpus)
    save_index(args.output, store, corpus.label_matrix(catalog),
               catalog, _provenance(cfg, "index"))
    print(f"indexed {len(store)} cases -> {args.output}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    store, labels, catalog, _ = load_index(args.index)
    corpus = load_corpus(args.corpus, catalog)
    store.check_alignment(corpus)
    splits = chronological_split(corpus, *cfg.split_sizes(len(corpus)))
    params = train(splits, store, catalog, cfg.retrieval_config(),
                   cfg.train_config())
    params.meta = {**_provenance(cfg, "train"),
                   "config_text": cfg.to_text()}
    save_model(params, args.output)
    print(f"trained model on {splits.n_train} cases -> {args.output}")
    return 0


def _split_ranks(splits, which: str):
    ranks = {"train": splits.train_ranks,
             "validation": splits.val_ranks,
             "test": splits.test_ranks}.get(which)
    if ranks is None:
        raise ConfigError(f"unknown split {which!r}")
    return ranks


def cmd_predict(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    store, labels, catalog, _ = load_index(args.index)
    corpus = load_corpus(args.corpus, catalog)
    store.check_alignment(corpus)
    splits = chronological_split(corpus, *cfg.split_sizes(len(corpus)))
    params = load_model(args.model)
    retr = cfg.retrieval_config()
    lines = [_canonical_json(
        {"_meta": {**_provenance(cfg, "predict"),
                   "split": args.split}})]
    for rank in _split_ranks(splits, args.split):
        pred, evidence = predict_with_evidence(
            corpus[rank], rank, params, store, labels, retr)
        lines.append(_canonical_json(
            prediction_record(corpus[rank].case_id, pred, catalog,
                              evidence)))
    Path(args.output).write_text("\n".join(lines) + "\n",
                                 encoding="utf-8")
    print(f"wrote {len(lines) - 1} predictions -> {args.output}")
    return 0


def _report_from_predictions(args: argparse.Namespace, cfg: RunConfig
                             ) -> MetricsReport:
    catalog = _catalog_from(args)
    corpus = load_corpus(args.corpus, catalog)
    probs_rows, decision_rows, truth_rows = [], [], []
    text = Path(args.predictions).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MalformedRecordError(
                f"{args.predictions}:{lineno}: {exc}") from exc
        if "_meta" in obj:
            continue
        probs_rows.append(np.array(obj["probabilities"],
                                   dtype=np.float64))
        decision_rows.append(
            encode_labels(obj["decisions"], catalog))
        rank = corpus.rank_of(obj["case_id"])
        truth_rows.append(
            encode_labels(corpus[rank].articles, catalog))
    if not probs_rows:
        raise MalformedRecordError(
            f"{args.predictions}: no prediction records")
    return compute_report(np.stack(probs_rows),
                          np.stack(decision_rows),
                          np.stack(truth_rows),
                          seed=cfg.get("seed"))


def cmd_evaluate(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    if args.predictions:
        report = _report_from_predictions(args, cfg)
    else:
        if not (args.index and args.model):
            raise ConfigError(
                "evaluate needs either --predictions or both "
                "--index and --model")
        store, _, catalog, _ = load_index(args.index)
        corpus = load_corpus(args.corpus, catalog)
        store.check_alignment(corpus)
        splits = chronological_split(corpus,
                                     *cfg.split_sizes(len(corpus)))
        params = load_model(args.model)
        report = evaluate_split(params, splits, store, catalog,
                                cfg.retrieval_config(), args.split,
                                seed=cfg.get("seed"))
    payload = {**_provenance(cfg, "evaluate"),
               "report": json.loads(report.to_json())}
    if args.output:
        Path(args.output).write_text(_canonical_json(payload) + "\n",
                                     encoding="utf-8")
    print(format_report_table([("evaluation", [report])]), end="")
    return 0


def cmd_ablate(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    catalog = _catalog_from(args)
    corpus = load_corpus(args.corpus, catalog)
    splits = chronological_split(corpus, *cfg.split_sizes(len(corpus)))
    spec = {"flags": AblationSpec.flag_matrix,
            "k": AblationSpec.k_sweep,
            "alpha": AblationSpec.alpha_sweep,
            "lambda": AblationSpec.lam_sweep}[args.experiment]()
    seeds = [int(s) for s in args.seeds.split(",") if s.strip()]
    if not seeds:
        raise ConfigError("at least one seed required")
    result = run_ablation(spec, splits, catalog, seeds,
                          cfg.encoder_config(), cfg.retrieval_config(),
                          cfg.train_config())
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = json.loads(result.to_json())
    payload["provenance"] = _provenance(cfg, "ablate")
    (out_dir / "rows.json").write_text(
        _canonical_json(payload) + "\n", encoding="utf-8")
    (out_dir / "table.txt").write_text(result.to_text(),
                                       encoding="utf-8")
    (out_dir / "sweep.csv").write_text(result.to_csv(),
                                       encoding="utf-8")
    print(result.to_text(), end="")
    return 0


def cmd_gen_drift(args: argparse.Namespace) -> int:
    cfg = _config_from(args)
    corpus_cfg = DriftCorpusConfig(
        n_cases=args.n, n_labels=args.n_labels,
        vocab_size=args.vocab_size, rotation_rate=args.rotation,
        noise_rate=args.noise, seed=cfg.get("seed"))
    corpus = generate_drift_corpus(corpus_cfg)
    corpus.save_jsonl(args.output)
    if args.labels_output:
        synthetic_catalog(args.n_labels).to_file(args.labels_output)
    print(f"generated {len(corpus)} drifting cases -> {args.output}")
    return 0


# --------------------------------------------------------------- parser

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caseline",
        description="Retrieval-augmented, temporally-aware multi-label "
                    "case outcome prediction pipeline.")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="run configuration file")
    common.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key")
    common.add_argument("--seed", type=int,
                        help="override the global seed")
    common.add_argument("--labels-file",
                        help="label catalog file (one name per line); "
                             "defaults to the built-in catalog")
    common.add_argument("-v", "--verbose", action="store_true",
                        help="log progress at INFO level")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common],
                       help="validate, sort and canonicalize a corpus")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("summarize", parents=[common],
                       help="summarize case texts via the remote "
                            "service")
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_summarize)

    p = sub.add_parser("train-encoder", parents=[common],
                       help="contrastive-train the case encoder")
    p.add_argument("--corpus", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_train_encoder)

    p = sub.add_parser("embed", parents=[common],
                       help="embed every case with a trained encoder")
    p.add_argument("--corpus", required=True)
    p.add_argument("--encoder", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("index", parents=[common],
                       help="bundle embeddings and labels for "
                            "retrieval")
    p.add_argument("--corpus", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("train", parents=[common],
                       help="train the classifier and drift head")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common],
                       help="write per-case predictions with evidence")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--model", required=True)
    p.add_argument("--output", required=True)
    p.add_argument("--split", default="test",
                   choices=["train", "validation", "test"])
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common],
                       help="compute micro metrics for a split or a "
                            "predictions file")
    p.add_argument("--corpus", required=True)
    p.add_argument("--index")
    p.add_argument("--model")
    p.add_argument("--predictions",
                   help="evaluate this predictions file instead of "
                        "running the model")
    p.add_argument("--output", help="write the JSON report here")
    p.add_argument("--split", default="test",
                   choices=["train", "validation", "test"])
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("ablate", parents=[common],
                       help="run an ablation or sweep experiment")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--experiment", default="flags",
                   choices=["flags", "k", "alpha", "lambda"])
    p.add_argument("--seeds", default="0,1,2,3,4",
                   help="comma-separated seed list")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("gen-drift", parents=[common],
                       help="generate a synthetic drifting corpus")
    p.add_argument("--output", required=True)
    p.add_argument("--labels-output",
                   help="also write the label catalog here")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--n-labels", type=int, default=8)
    p.add_argument("--vocab-size", type=int, default=2000)
    p.add_argument("--rotation", type=float, default=1.5)
    p.add_argument("--noise", type=float, default=0.3)
    p.set_defaults(func=cmd_gen_drift)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CaselineError as exc:
        print(json.dumps({"error": type(exc).__name__,
                          "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "IoFailureError",
                          "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
