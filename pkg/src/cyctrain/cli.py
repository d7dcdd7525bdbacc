"""Command-line front end.

Subcommands: ``schedule`` (emit a cyclical trace as CSV), ``train`` (one
run with a per-epoch CSV log), ``compare`` (paired-seed A/B of two config
files), ``sweep`` (rerun one config across cyclical factors) and ``check``
(the lr*wd/(bs*(1-m)) rule of thumb).

Flags use underscore spellings with hyphen aliases; config files use the
same keys (see ``harness.config_from_kv``).  Data streams (CSV/JSON) go
to standard output or to files; diagnostics go to standard error.  Exit
codes: 0 success, 1 runtime failure, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .controllers import RATIO_HI, RATIO_LO, hp_ratio, ratio_in_range
from .harness import (
    ConfigError,
    ExperimentConfig,
    TrainingAborted,
    compare,
    config_from_kv,
    config_to_kv,
    run_csv_lines,
    run_experiment,
    summary_json,
    sweep_fc,
    write_run_csv,
)
from .schedule import CyclicalSchedule, schedule_trace

_CONFIG_FLAGS = [
    # (field, aliases, type)
    ("classes", (), int),
    ("dims", (), int),
    ("train_samples", ("--train-samples",), int),
    ("test_samples", ("--test-samples",), int),
    ("spread", (), float),
    ("label_noise", ("--label-noise",), float),
    ("hidden", (), str),
    ("epochs", (), int),
    ("cooldown_epochs", ("--cooldown-epochs",), int),
    ("lr", (), float),
    ("weight_decay", ("--weight-decay",), float),
    ("momentum", (), float),
    ("batch_size", ("--batch-size", "-b"), int),
    ("temperature", (), float),
    ("clip", (), float),
    ("clip_mode", ("--clip-mode",), str),
    ("sched", (), str),
    ("warmup_epochs", ("--warmup-epochs",), int),
    ("warmup_lr", ("--warmup-lr",), float),
    ("cyclical_factor", ("--cyclical-factor",), float),
    ("wd_min", ("--wd-min",), float),
    ("wd_max", ("--wd-max",), float),
    ("wd_fc", ("--wd-fc",), float),
    ("T_min", ("--T-min",), float),
    ("T_max", ("--T-max",), float),
    ("T_fc", ("--T-fc",), float),
    ("clip_min", ("--clip-min",), float),
    ("clip_max", ("--clip-max",), float),
    ("clip_fc", ("--clip-fc",), float),
    ("bs_min", ("--bs-min",), int),
    ("bs_max", ("--bs-max",), int),
    ("bs_fc", ("--bs-fc",), float),
    ("m_min", ("--m-min",), float),
    ("m_max", ("--m-max",), float),
    ("m_fc", ("--m-fc",), float),
    ("aug_min", ("--aug-min",), float),
    ("aug_max", ("--aug-max",), float),
    ("aug_fc", ("--aug-fc",), float),
]


def _int_list(raw: str) -> list[int]:
    return [int(v) for v in raw.split(",") if v.strip()]


def _float_list(raw: str) -> list[float]:
    return [float(v) for v in raw.split(",") if v.strip()]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    for name, aliases, typ in _CONFIG_FLAGS:
        parser.add_argument(f"--{name}", *aliases, dest=name, type=typ,
                            default=None)
    parser.add_argument("--mask_losses", "--mask-losses", dest="mask_losses",
                        action="store_true", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cyctrain", allow_abbrev=False,
                                     description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("schedule", allow_abbrev=False,
                       help="print a cyclical trace as epoch,value CSV")
    p.add_argument("--epochs", type=int, required=True)
    p.add_argument("--p_easy", "--p-easy", dest="p_easy", type=float, required=True)
    p.add_argument("--p_hard", "--p-hard", dest="p_hard", type=float, required=True)
    p.add_argument("--cyclical_factor", "--cyclical-factor",
                   dest="cyclical_factor", type=float, required=True)

    p = sub.add_parser("train", allow_abbrev=False,
                       help="run one experiment, writing a per-epoch CSV log")
    p.add_argument("--config", help="flat key=value config file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--log", help="CSV log path (default: standard output)")
    _add_config_flags(p)

    p = sub.add_parser("compare", allow_abbrev=False,
                       help="paired-seed comparison of two config files")
    p.add_argument("--config-a", "--config_a", dest="config_a", required=True)
    p.add_argument("--config-b", "--config_b", dest="config_b", required=True)
    p.add_argument("--seeds", type=_int_list, required=True,
                   help="comma-separated seed list, e.g. 0,1,2")
    p.add_argument("--out", help="summary JSON path (default: standard output)")

    p = sub.add_parser("sweep", allow_abbrev=False,
                       help="rerun one config across cyclical factors")
    p.add_argument("--config", required=True)
    p.add_argument("--fc", type=_float_list, required=True,
                   help="comma-separated factors, e.g. 1,2,4")
    p.add_argument("--seeds", type=_int_list, required=True)
    p.add_argument("--out", help="CSV table path (default: standard output)")

    p = sub.add_parser("check", allow_abbrev=False,
                       help="report the lr*wd/(bs*(1-m)) balance of a config")
    p.add_argument("--lr", type=float, required=True)
    p.add_argument("--wd", "--weight_decay", "--weight-decay", dest="wd",
                   type=float, required=True)
    p.add_argument("--bs", "--batch_size", "--batch-size", "-b", dest="bs",
                   type=int, required=True)
    p.add_argument("--momentum", type=float, default=0.9,
                   help="defaults to the conventional 0.9")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    """Assemble a config from an optional file plus flag overrides."""
    base = ExperimentConfig()
    if getattr(args, "config", None):
        with open(args.config) as fh:
            base = config_from_kv(fh.read(), base=base)
    overrides = {}
    for name, _, _ in _CONFIG_FLAGS:
        value = getattr(args, name)
        if value is None:
            continue
        if name == "hidden":
            value = tuple(_int_list(value))
        overrides[name] = value
    if args.mask_losses is not None:
        overrides["mask_losses"] = args.mask_losses
    return dataclasses.replace(base, **overrides)


def config_to_flags(config: ExperimentConfig) -> list[str]:
    """Serialize a config back to the flag list that reproduces it."""
    flags = []
    for name, _, _ in _CONFIG_FLAGS:
        value = getattr(config, name)
        if value is None:
            continue
        if name == "hidden":
            value = ",".join(str(v) for v in value)
        flags.extend([f"--{name}", repr(value) if isinstance(value, float) else str(value)])
    if config.mask_losses:
        flags.append("--mask_losses")
    return flags


def _cmd_schedule(args, out) -> int:
    sched = CyclicalSchedule(args.p_easy, args.p_hard, args.cyclical_factor,
                             args.epochs)
    out.write("epoch,value\n")
    for epoch, value in schedule_trace(sched):
        out.write(f"{epoch},{value!r}\n")
    return 0


def _cmd_train(args, out, err) -> int:
    config = config_from_args(args)
    for note in config.advisories():
        err.write(f"note: {note}\n")
    records, final = run_experiment(config, args.seed)
    summary = f"final_test_accuracy {final!r} (seed {args.seed})\n"
    if args.log:
        write_run_csv(records, args.log)
        out.write(summary)
    else:
        out.write("\n".join(run_csv_lines(records)) + "\n")
        err.write(summary)
    return 0


def _load_config_file(path) -> ExperimentConfig:
    with open(path) as fh:
        return config_from_kv(fh.read())


def _cmd_compare(args, out) -> int:
    config_a = _load_config_file(args.config_a)
    config_b = _load_config_file(args.config_b)
    summary = compare(config_a, config_b, args.seeds)
    text = summary_json(summary, config_a, config_b)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        out.write(text + "\n")
    return 0


def _cmd_sweep(args, out) -> int:
    config = _load_config_file(args.config)
    rows = sweep_fc(config, args.fc, args.seeds)
    lines = ["cyclical_factor,mean_acc,std_acc"]
    lines += [f"{r['cyclical_factor']!r},{r['mean_acc']!r},{r['std_acc']!r}"
              for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def _cmd_check(args, out) -> int:
    ratio = hp_ratio(args.lr, args.wd, args.bs, args.momentum)
    verdict = "in-range" if ratio_in_range(ratio) else "out-of-range"
    out.write(f"ratio {ratio!r}\n")
    out.write(f"band [{RATIO_LO!r}, {RATIO_HI!r}] around 1e-06: {verdict}\n")
    return 0


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "schedule":
            return _cmd_schedule(args, out)
        if args.command == "train":
            return _cmd_train(args, out, err)
        if args.command == "compare":
            return _cmd_compare(args, out)
        if args.command == "sweep":
            return _cmd_sweep(args, out)
        if args.command == "check":
            return _cmd_check(args, out)
        raise AssertionError(f"unhandled command {args.command!r}")
    except TrainingAborted as exc:
        err.write(f"error: {exc}\n")
        return 1
    except (ConfigError, ValueError, OSError) as exc:
        err.write(f"error: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
