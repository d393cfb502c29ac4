"""Command-line surface: split, discover, gid, study, estimate-k, report.

Configuration comes from an optional JSON file (--config) with flag
overrides on top; flags win. Session mode is one of --scripted,
--replay, or live (optionally with --record). Exit codes: 0 success,
2 configuration error, 3 provider or replay error, 4 parse failure,
1 anything else.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path
from typing import Callable, Optional

from .errors import ConfigError, HarnessError
from .gateway import ExchangeStore, LiveSession, ReplaySession, ScriptedSession, Session
from .prompts import DiscoveryMethod, PromptVariant
from .reporting import emit_report, read_report_file
from .runner import (
    EvalReport,
    ExperimentConfig,
    StudySpec,
    config_from_dict,
    resolve_corpus,
    resolve_split,
    run_discovery,
    run_estimate_k,
    run_gid,
    run_study,
)
from .corpus import write_split
from .embed_cluster import load_embeddings

SessionFactory = Callable[[], Session]


def _abs(value: Optional[str]) -> Optional[str]:
    return str(Path(value).absolute()) if value is not None else None


def _load_payload(args) -> tuple[dict, Optional[Path]]:
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        try:
            payload = json.loads(path.read_text("utf-8"))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {path}: {exc}")
        if not isinstance(payload, dict):
            raise ConfigError(f"config file must hold a JSON object: {path}")
        return payload, path.parent
    return {}, None


def _apply_overrides(payload: dict, args) -> None:
    simple = {
        "corpus": _abs(getattr(args, "corpus", None)),
        "corpus_format": getattr(args, "corpus_format", None),
        "split_file": _abs(getattr(args, "split", None)),
        "method": getattr(args, "method", None),
        "variant": getattr(args, "variant", None),
        "runs": getattr(args, "runs", None),
        "seed": getattr(args, "seed", None),
        "demo_strategy": getattr(args, "demos", None),
        "intent_set_source": getattr(args, "intent_set", None),
        "descriptions": _abs(getattr(args, "descriptions", None)),
        "max_prompt_chars": getattr(args, "max_prompt_chars", None),
    }
    for key, value in simple.items():
        if value is not None:
            payload[key] = value
    if getattr(args, "no_cluster_count", False):
        payload["include_cluster_count"] = False

    split_flags = {
        "n_ind": getattr(args, "n_ind", None),
        "m_ood": getattr(args, "m_ood", None),
        "discovery_per_class": getattr(args, "discovery_per_class", None),
        "gid_per_class": getattr(args, "gid_per_class", None),
        "demos_per_class": getattr(args, "demos_per_class", None),
        "fixed_labels": _abs(getattr(args, "fixed_labels", None)),
    }
    if any(value is not None for value in split_flags.values()):
        entry = dict(payload.get("split", {}))
        for key, value in split_flags.items():
            if value is not None:
                entry[key] = value
        payload["split"] = entry

    provider_flags = {
        "model_name": getattr(args, "model", None),
        "base_url": getattr(args, "base_url", None),
        "api_key_env": getattr(args, "api_key_env", None),
        "temperature": getattr(args, "temperature", None),
        "timeout": getattr(args, "timeout", None),
        "max_retries": getattr(args, "max_retries", None),
    }
    if any(value is not None for value in provider_flags.values()):
        entry = dict(payload.get("provider", {}))
        for key, value in provider_flags.items():
            if value is not None:
                entry[key] = value
        payload["provider"] = entry


def _build_config(args) -> ExperimentConfig:
    payload, base_dir = _load_payload(args)
    _apply_overrides(payload, args)
    return config_from_dict(payload, base_dir)


def _session_factory(args) -> SessionFactory:
    scripted = getattr(args, "scripted", None)
    replay = getattr(args, "replay", None)
    record = getattr(args, "record", None)
    chosen = [name for name, value in
              [("--scripted", scripted), ("--replay", replay)] if value]
    if len(chosen) > 1:
        raise ConfigError(f"{' and '.join(chosen)} are mutually exclusive")
    if record and (scripted or replay):
        raise ConfigError("--record applies to live sessions only")
    if scripted:
        path = Path(scripted)
        return lambda: ScriptedSession(path)
    if replay:
        store = ExchangeStore(Path(replay))
        return lambda: ReplaySession(store)
    store = ExchangeStore(Path(record)) if record else None
    live = LiveSession(record_store=store)
    return lambda: live


def _print_summary(report: EvalReport) -> None:
    mean = report.mean_metrics()
    cells = " ".join(f"{key}={mean[key]:.4f}" for key in sorted(mean))
    tag = f" {report.label}" if report.label else ""
    print(f"[{report.kind}{tag}] runs={len(report.run_results)} mean {cells}")


def _emit(reports: list[EvalReport], args) -> None:
    for report in reports:
        _print_summary(report)
    if getattr(args, "out", None):
        emit_report(reports, "json", args.out)
        print(f"wrote {args.out}")
    if getattr(args, "markdown", None):
        emit_report(reports, "markdown", args.markdown)
        print(f"wrote {args.markdown}")
    if getattr(args, "csv", None):
        emit_report(reports, "csv", args.csv)
        print(f"wrote {args.csv}")


def _cmd_split(args) -> int:
    config = _build_config(args)
    if config.split is None:
        raise ConfigError("the split command needs --n-ind and --m-ood (or a config file)")
    corpus = resolve_corpus(config)
    split = resolve_split(config, corpus)
    write_split(split, args.out)
    print(
        f"wrote {args.out}: {len(split.ind_labels)} IND / {len(split.ood_labels)} OOD, "
        f"discovery {len(split.discovery_pool)}, gid test {len(split.gid_test_pool)}, "
        f"ratio {split.ratio_tag}"
    )
    return 0


def _cmd_discover(args) -> int:
    config = _build_config(args)
    factory = _session_factory(args)
    report = run_discovery(config, factory())
    _emit([report], args)
    return 0


def _cmd_gid(args) -> int:
    config = _build_config(args)
    factory = _session_factory(args)
    report = run_gid(config, factory())
    _emit([report], args)
    return 0


def _cmd_study(args) -> int:
    config = _build_config(args)
    study = config.study
    axis_updates = {}
    if args.sample_sweep:
        axis_updates["sample_sweep"] = tuple(_int_list(args.sample_sweep))
    if args.demo_study:
        axis_updates["demo_strategies"] = ("none", "ind", "ood")
    if args.intent_set_study:
        axis_updates["intent_set_ablation"] = True
    if args.variant_study:
        axis_updates["prompt_variants"] = tuple(PromptVariant)
    if args.estimate_k_study:
        axis_updates["estimate_k"] = True
    if args.k_prime:
        axis_updates["baseline_k_prime"] = tuple(_int_list(args.k_prime))
    if args.ratio is not None:
        axis_updates["size_threshold_ratio"] = args.ratio
    if args.embeddings:
        axis_updates["embeddings_path"] = Path(args.embeddings)
    if axis_updates:
        study = dataclasses.replace(study or StudySpec(), **axis_updates)
    if study is None:
        raise ConfigError("no study axes requested (flags or config 'study' section)")
    reports = run_study(config, _session_factory(args), study)
    _emit(reports, args)
    return 0


def _cmd_estimate_k(args) -> int:
    config = _build_config(args)
    factory = _session_factory(args)
    embeddings = load_embeddings(args.embeddings) if args.embeddings else None
    baseline = _int_list(args.k_prime) if args.k_prime else []
    report = run_estimate_k(
        config,
        factory(),
        embeddings=embeddings,
        baseline_k_prime=baseline,
        size_threshold_ratio=args.ratio if args.ratio is not None else 0.9,
    )
    _emit([report], args)
    return 0


def _cmd_report(args) -> int:
    reports = read_report_file(getattr(args, "in"))
    emit_report(reports, args.format, args.out)
    print(f"wrote {args.out}")
    return 0


def _int_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"expected a comma-separated integer list, got {text!r}")


def _add_common(parser: argparse.ArgumentParser, with_session: bool = True) -> None:
    parser.add_argument("--config", help="JSON config file; flags override its values")
    parser.add_argument("--corpus", help="corpus file (jsonl or tsv)")
    parser.add_argument("--corpus-format", choices=["jsonl", "tsv"], dest="corpus_format")
    parser.add_argument("--split", help="pre-made split file")
    parser.add_argument("--n-ind", type=int, dest="n_ind")
    parser.add_argument("--m-ood", type=int, dest="m_ood")
    parser.add_argument("--discovery-per-class", type=int, dest="discovery_per_class")
    parser.add_argument("--gid-per-class", type=int, dest="gid_per_class")
    parser.add_argument("--demos-per-class", type=int, dest="demos_per_class")
    parser.add_argument("--fixed-labels", dest="fixed_labels",
                        help="JSON file with fixed IND/OOD label lists")
    parser.add_argument("--method", choices=[m.value for m in DiscoveryMethod])
    parser.add_argument("--variant", choices=[v.value for v in PromptVariant])
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--no-cluster-count", action="store_true", dest="no_cluster_count",
                        help="omit the cluster count from prompts")
    parser.add_argument("--max-prompt-chars", type=int, dest="max_prompt_chars")
    parser.add_argument("--model", help="provider model name")
    parser.add_argument("--base-url", dest="base_url")
    parser.add_argument("--api-key-env", dest="api_key_env")
    parser.add_argument("--temperature", type=float)
    parser.add_argument("--timeout", type=float)
    parser.add_argument("--max-retries", type=int, dest="max_retries")
    if with_session:
        parser.add_argument("--scripted", help="scripted response fixture (JSON)")
        parser.add_argument("--replay", help="replay exchanges from this store")
        parser.add_argument("--record", help="record live exchanges to this store")


def _add_outputs(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", help="write the JSON report here")
    parser.add_argument("--markdown", help="write a markdown report here")
    parser.add_argument("--csv", help="write a CSV report here")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="openintent",
        description="Intent discovery and joint classification experiment harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("split", help="draw and save an IND/OOD experiment split")
    _add_common(p, with_session=False)
    p.add_argument("--out", required=True, help="split file to write")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("discover", help="run the clustering experiment")
    _add_common(p)
    _add_outputs(p)
    p.set_defaults(func=_cmd_discover)

    p = sub.add_parser("gid", help="run the two-stage joint classification experiment")
    _add_common(p)
    p.add_argument("--demos", choices=["none", "ind", "ood"])
    p.add_argument("--intent-set", dest="intent_set",
                   choices=["pseudo", "ground_truth", "ground_truth_with_descriptions"])
    p.add_argument("--descriptions", help="JSON file of intent descriptions")
    _add_outputs(p)
    p.set_defaults(func=_cmd_gid)

    p = sub.add_parser("study", help="fan out over study axes")
    _add_common(p)
    p.add_argument("--demos", choices=["none", "ind", "ood"])
    p.add_argument("--intent-set", dest="intent_set",
                   choices=["pseudo", "ground_truth", "ground_truth_with_descriptions"])
    p.add_argument("--descriptions")
    p.add_argument("--sample-sweep", dest="sample_sweep",
                   help="comma-separated discovery samples per class")
    p.add_argument("--demo-study", action="store_true", dest="demo_study")
    p.add_argument("--intent-set-study", action="store_true", dest="intent_set_study")
    p.add_argument("--variant-study", action="store_true", dest="variant_study")
    p.add_argument("--estimate-k-study", action="store_true", dest="estimate_k_study")
    p.add_argument("--k-prime", dest="k_prime", help="comma-separated K' values")
    p.add_argument("--ratio", type=float, help="small-cluster size threshold ratio")
    p.add_argument("--embeddings", help="embedding JSONL for the baseline estimator")
    _add_outputs(p)
    p.set_defaults(func=_cmd_study)

    p = sub.add_parser("estimate-k", help="cluster-count estimation run")
    _add_common(p)
    p.add_argument("--k-prime", dest="k_prime", help="comma-separated K' values")
    p.add_argument("--ratio", type=float)
    p.add_argument("--embeddings")
    _add_outputs(p)
    p.set_defaults(func=_cmd_estimate_k)

    p = sub.add_parser("report", help="re-render a JSON report as csv or markdown")
    p.add_argument("--in", dest="in", required=True, help="JSON report file")
    p.add_argument("--format", required=True, choices=["json", "csv", "markdown"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except HarnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
