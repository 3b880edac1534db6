"""Command-line driver: train, eval, diagnose, serve.

Exit codes are a stable contract: 0 success, 2 usage/config error,
3 runtime failure (including training divergence). Options may come from a
JSON config file (--config); explicit flags win over file values.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import report as report_mod
from .data import DatasetParseError, DatasetSchemaError, load_dataset, to_features
from .reasoning import ImpactCosts, assess_flu, risk_value
from .restcn import (
    ModelConfig,
    TrainConfig,
    TrainingDivergedError,
    init_model,
    load_model,
    save_model,
    train,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_RUNTIME = 3


class CliUsageError(ValueError):
    """Bad flags, config values, or incompatible inputs: exit code 2."""


@dataclass
class AppConfig:
    """Optional config-file fields; flags override whatever is set here."""

    data: str | None = None
    model: dict = field(default_factory=dict)
    train: dict = field(default_factory=dict)
    cohorts: list[str] = field(default_factory=lambda: ["gender", "pose", "view"])
    alpha: float = 1.0
    beta: float = 1.0
    p_cough: float = report_mod.DEFAULT_P_COUGH
    p_sneeze: float = report_mod.DEFAULT_P_SNEEZE
    port: int = 8000

    @classmethod
    def load(cls, path: str | None) -> "AppConfig":
        if path is None:
            return cls()
        file = Path(path)
        if not file.exists():
            raise CliUsageError(f"config file not found: {path}")
        try:
            raw = json.loads(file.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CliUsageError(f"config file is not valid JSON: {exc}") from exc
        config = cls()
        for key, value in raw.items():
            if not hasattr(config, key):
                raise CliUsageError(f"unknown config key {key!r}")
            setattr(config, key, value)
        if not 1 <= int(config.port) <= 65535:
            raise CliUsageError(f"port must be in [1, 65535], got {config.port}")
        return config


def _require_file(path: str, what: str) -> Path:
    file = Path(path)
    if not file.is_file():
        raise CliUsageError(f"{what} not found: {path}")
    return file


def _probability(name: str, value: float) -> float:
    if not 0.0 <= value <= 1.0:
        raise CliUsageError(f"{name} must lie in [0, 1], got {value}")
    return value


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def _data_path(args: argparse.Namespace, config: AppConfig) -> Path:
    path = args.data if args.data is not None else config.data
    if path is None:
        raise CliUsageError("no dataset given: pass --data or set 'data' in the config file")
    return _require_file(path, "dataset")


def cmd_train(args: argparse.Namespace) -> int:
    config = AppConfig.load(args.config)
    dataset = load_dataset(_data_path(args, config))
    if len(dataset) == 0:
        raise CliUsageError("dataset is empty")

    model_kwargs = dict(config.model)
    model_kwargs["n_classes"] = dataset.n_classes
    try:
        model_config = ModelConfig(**model_kwargs)
    except (TypeError, ValueError) as exc:
        raise CliUsageError(f"bad model config: {exc}") from exc

    train_kwargs = dict(config.train)
    for key in ("epochs", "batch_size", "base_lr", "seed"):
        flag = getattr(args, key, None)
        if flag is not None:
            train_kwargs[key] = flag
    try:
        train_config = TrainConfig(**train_kwargs)
    except (TypeError, ValueError) as exc:
        raise CliUsageError(f"bad train config: {exc}") from exc

    x, labels = to_features(dataset, model_config.seq_len)
    model = replace(init_model(model_config, seed=train_config.seed), class_names=dataset.class_names)
    trained, history = train(model, x.astype(np.float32), labels, train_config)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(trained, out)
    history_path = Path(args.history) if args.history else out.with_suffix(out.suffix + ".history.json")
    history_path.write_text(json.dumps(history, indent=2), encoding="utf-8")
    print(f"trained {train_config.epochs} epochs on {len(dataset)} samples -> {out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = AppConfig.load(args.config)
    model = load_model(_require_file(args.model, "model artifact"))
    dataset = load_dataset(_data_path(args, config))
    if model.config.n_classes != dataset.n_classes:
        raise CliUsageError(
            f"model has {model.config.n_classes} classes, dataset has {dataset.n_classes}"
        )
    if model.class_names and tuple(model.class_names) != tuple(dataset.class_names):
        raise CliUsageError(
            f"model classes {list(model.class_names)} do not match dataset classes "
            f"{list(dataset.class_names)}"
        )
    cohorts = args.cohorts.split(",") if args.cohorts else list(config.cohorts)
    costs = ImpactCosts(
        alpha=args.alpha if args.alpha is not None else config.alpha,
        beta=args.beta if args.beta is not None else config.beta,
    )
    document = report_mod.build_report(
        model,
        dataset,
        cohort_attributes=tuple(cohorts),
        costs=costs,
        p_cough=args.p_cough if args.p_cough is not None else config.p_cough,
        p_sneeze=args.p_sneeze if args.p_sneeze is not None else config.p_sneeze,
    )
    out = Path(args.report)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(document, indent=2), encoding="utf-8")
    baseline = document["baseline"]
    print(
        f"evaluated {baseline['count']} samples: accuracy {baseline['metrics']['accuracy']:.3f}, "
        f"risk {baseline['risk']:.3f} -> {out}"
    )
    return EXIT_OK


def cmd_diagnose(args: argparse.Namespace) -> int:
    p_cough = _probability("--p-cough", args.p_cough)
    p_sneeze = _probability("--p-sneeze", args.p_sneeze)
    costs = ImpactCosts(
        alpha=args.alpha if args.alpha is not None else 1.0,
        beta=args.beta if args.beta is not None else 1.0,
    )

    if args.sens is not None or args.spec is not None:
        if args.sens is None or args.spec is None:
            raise CliUsageError("--sens and --spec must be given together")
        sens = _probability("--sens", args.sens)
        spec = _probability("--spec", args.spec)
        risk = risk_value(costs.alpha, costs.beta, sens, spec)
    elif args.report is not None:
        document = json.loads(_require_file(args.report, "report").read_text(encoding="utf-8"))
        metrics = document["baseline"]["metrics"]
        if args.cohort and args.cohort != "baseline":
            found = None
            for values in document["cohorts"].values():
                if args.cohort in values and not values[args.cohort].get("absent"):
                    found = values[args.cohort]["metrics"]
            if found is None:
                raise CliUsageError(f"cohort {args.cohort!r} not present in report")
            metrics = found
        risk = risk_value(costs.alpha, costs.beta, metrics["sensitivity"], metrics["specificity"])
    else:
        # No error-rate source: assume a perfect classifier (risk 0).
        risk = 0.0

    assessment = assess_flu(p_cough, p_sneeze, risk)
    print(f"risk:            {assessment.risk:.3f}")
    print(f"p(flu) base:     {assessment.p_flu_base:.3f}")
    print(f"p(flu) adjusted: {assessment.p_flu_adjusted:.3f}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .service import create_app_from_paths

    config = AppConfig.load(args.config)
    port = args.port if args.port is not None else config.port
    if not 1 <= port <= 65535:
        raise CliUsageError(f"port must be in [1, 65535], got {port}")
    static = args.static
    if static is not None and not Path(static).is_dir():
        raise CliUsageError(f"static directory not found: {static}")
    app = create_app_from_paths(
        _require_file(args.model, "model artifact"),
        _require_file(args.report, "report"),
        static_dir=static,
    )
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actionrisk",
        description="Train, evaluate, and serve the action-recognition risk pipeline.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model on a dataset")
    p_train.add_argument("--data", default=None, help="line-delimited JSON dataset")
    p_train.add_argument("--out", required=True, help="output model artifact path")
    p_train.add_argument("--config", default=None, help="JSON config file")
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--epochs", type=int, default=None)
    p_train.add_argument("--batch-size", dest="batch_size", type=int, default=None)
    p_train.add_argument("--base-lr", dest="base_lr", type=float, default=None)
    p_train.add_argument("--history", default=None, help="history JSON path")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a model and write the report")
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--data", default=None)
    p_eval.add_argument("--report", required=True, help="output report JSON path")
    p_eval.add_argument("--cohorts", default=None, help="comma-separated attribute list")
    p_eval.add_argument("--config", default=None)
    p_eval.add_argument("--alpha", type=float, default=None)
    p_eval.add_argument("--beta", type=float, default=None)
    p_eval.add_argument("--p-cough", dest="p_cough", type=float, default=None)
    p_eval.add_argument("--p-sneeze", dest="p_sneeze", type=float, default=None)
    p_eval.set_defaults(func=cmd_eval)

    p_diag = sub.add_parser("diagnose", help="risk-adjusted flu probability")
    p_diag.add_argument("--p-cough", dest="p_cough", type=float, required=True)
    p_diag.add_argument("--p-sneeze", dest="p_sneeze", type=float, required=True)
    p_diag.add_argument("--alpha", type=float, default=None)
    p_diag.add_argument("--beta", type=float, default=None)
    p_diag.add_argument("--sens", type=float, default=None)
    p_diag.add_argument("--spec", type=float, default=None)
    p_diag.add_argument("--report", default=None, help="take error rates from a report")
    p_diag.add_argument("--cohort", default=None, help="cohort name within the report")
    p_diag.set_defaults(func=cmd_diagnose)

    p_serve = sub.add_parser("serve", help="serve the model and report over HTTP")
    p_serve.add_argument("--model", required=True)
    p_serve.add_argument("--report", required=True)
    p_serve.add_argument("--port", type=int, default=None)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--config", default=None)
    p_serve.add_argument("--static", default=None, help="directory of console assets")
    p_serve.set_defaults(func=cmd_serve)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliUsageError, DatasetParseError, DatasetSchemaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDivergedError as exc:
        print(f"training diverged: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # runtime failures map to exit 3
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def entrypoint() -> None:
    sys.exit(main())
