"""Command-line front end: ``finsent train|predict|evaluate|cv|sweep``.

Exit status is 0 on success, 2 for usage or validation errors and 1 for
anything unexpected.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from finsent import persistence
from finsent.corpus import Dataset, dump_headlines, load_headlines
from finsent.exceptions import FinsentError, ValidationError
from finsent.metrics import evaluate
from finsent.model_selection import cross_validate, dump_sweep, format_sweep_table, grid_sweep, load_grid
from finsent.pipeline import build_pipeline, load_config, parse_config
from finsent.regress import clip_scores
from finsent.synthetic import sample_headlines

log = logging.getLogger("finsent")


def _read_dataset(path) -> Dataset:
    data = Path(path).read_bytes()
    if not data.strip():
        return Dataset(())
    return load_headlines(data)


def _read_json(path):
    try:
        return json.loads(Path(path).read_bytes().decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


def _require_scored(dataset: Dataset, what: str) -> None:
    missing = dataset.unscored_ids()
    if missing:
        shown = ", ".join(missing[:20]) + (" ..." if len(missing) > 20 else "")
        raise ValidationError(f"{what} has {len(missing)} unscored record(s): {shown}")


def _dump_json(obj) -> str:
    return json.dumps(obj, indent=2, allow_nan=False)


def format_predictions(ids, scores) -> str:
    """JSON array of ``{"id", "sentiment"}`` with six decimal places."""
    if not ids:
        return "[]\n"
    lines = [f'  {{"id": {json.dumps(i, ensure_ascii=False)}, "sentiment": {s:.6f}}}' for i, s in zip(ids, scores)]
    return "[\n" + ",\n".join(lines) + "\n]\n"


def cmd_train(args) -> int:
    config = load_config(args.config)
    if args.seed is not None:
        config = parse_config({**config.to_dict(), "seed": args.seed})
    dataset = _read_dataset(args.data)
    _require_scored(dataset, "training data")
    if not len(dataset):
        raise ValidationError("training data is empty")
    pipeline = build_pipeline(config).fit(list(dataset), dataset.sentiments)
    persistence.save(persistence.encode_bundle(config, pipeline), args.model)
    n_features = pipeline.named_steps["regress"].n_features_in_
    print(f"trained on {len(dataset)} records, {n_features} features -> {args.model}")
    return 0


def cmd_predict(args) -> int:
    config, pipeline = persistence.decode_bundle(persistence.load(args.model))
    dataset = _read_dataset(args.data)
    scores = []
    if len(dataset):
        scores = pipeline.predict(list(dataset))
        if config.clip:
            scores = clip_scores(scores)
    Path(args.out).write_text(format_predictions(dataset.ids, scores), encoding="utf-8")
    print(f"wrote {len(dataset)} predictions -> {args.out}")
    return 0


def _read_predictions(path) -> dict:
    raw = _read_json(path)
    if not isinstance(raw, list):
        raise ValidationError(f"{path}: expected a JSON array of predictions")
    preds = {}
    for pos, item in enumerate(raw):
        if not isinstance(item, dict) or not isinstance(item.get("id"), str) or \
                isinstance(item.get("sentiment"), bool) or not isinstance(item.get("sentiment"), (int, float)):
            raise ValidationError(f"{path}: element {pos} is not {{\"id\": str, \"sentiment\": number}}")
        if item["id"] in preds:
            raise ValidationError(f"{path}: duplicate prediction id {item['id']!r}")
        preds[item["id"]] = float(item["sentiment"])
    return preds


def evaluate_files(gold_path, pred_path) -> dict:
    gold = _read_dataset(gold_path)
    _require_scored(gold, "gold data")
    preds = _read_predictions(pred_path)
    unknown = [i for i in preds if i not in gold]
    if unknown:
        raise ValidationError(f"prediction id(s) not in gold: {', '.join(unknown[:20])}")
    matched = [r for r in gold if r.id in preds]
    if not matched:
        raise ValidationError("no predictions to evaluate")
    report = evaluate([r.sentiment for r in matched], [preds[r.id] for r in matched], num_gold_total=len(gold))
    return report.to_dict()


def cmd_evaluate(args) -> int:
    print(_dump_json(evaluate_files(args.gold, args.pred)))
    return 0


def cmd_cv(args) -> int:
    config = load_config(args.config)
    dataset = _read_dataset(args.data)
    seed = config.seed if args.seed is None else args.seed
    result = cross_validate(dataset, config, args.folds, seed)
    out = {"k": args.folds, "seed": seed, **result.to_dict()}
    del out["fold_indices"]
    print(_dump_json(out))
    return 0


def cmd_sweep(args) -> int:
    raw = _read_json(args.config)
    if isinstance(raw, dict):
        if args.folds is not None:
            raw["folds"] = args.folds
        if args.seed is not None:
            raw["seed"] = args.seed
    grid = load_grid(raw)
    dataset = _read_dataset(args.data)
    _require_scored(dataset, "sweep data")
    rows = grid_sweep(dataset, grid)
    table = format_sweep_table(rows)
    if args.out:
        out = Path(args.out)
        dump_sweep(rows, out, grid.folds)
        out.with_suffix(".txt").write_text(table, encoding="utf-8")
    print(f"{grid.folds}-fold cross-validation, seed {grid.seed}")
    print(table, end="")
    return 0


def cmd_sample(args) -> int:
    Path(args.out).write_text(dump_headlines(sample_headlines()), encoding="utf-8")
    print(f"wrote sample corpus -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="finsent", description="Financial headline sentiment regression.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fit a pipeline and write a model bundle")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--model", required=True, help="bundle output path")
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", help="score headlines with a model bundle")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", help="R^2 and cosine score of predictions against gold")
    p.add_argument("--gold", required=True)
    p.add_argument("--pred", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("cv", help="k-fold cross-validation of one pipeline config")
    p.add_argument("--config", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--folds", type=int, default=5)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_cv)

    p = sub.add_parser("sweep", help="cross-validate and rank a grid of configs")
    p.add_argument("--config", required=True, help="sweep grid JSON")
    p.add_argument("--data", required=True)
    p.add_argument("--out", help="ranked JSON table path (text table goes next to it as .txt)")
    p.add_argument("--folds", type=int)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("sample", help="write the bundled synthetic corpus")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (FinsentError, OSError) as exc:
        print(f"finsent {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return 1


if __name__ == "__main__":
    sys.exit(main())
