"""Command-line driver: ``nisqueeze generate | train | sweep | report``."""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from .__version__ import __version__
from .checkpoint import Checkpoint, TrainingHistory, load_checkpoint, save_checkpoint
from .config import TOOL_NAME, OptimizerKind, TrainConfig, artifact_header
from .datagen import (
    BoolNetParams,
    MarkovParams,
    SpringParams,
    gen_boolnet,
    gen_markov,
    gen_spring,
    load_mechanism_table,
)
from .dataset import TransitionPairs, read_dataset, write_csv, write_dataset
from .ei import DEFAULT_NOISE_FLOOR, EiConfig, SweepResult, sweep_frame, sweep_q, verdict_lines, write_sweep
from .errors import ConfigurationError, DatasetError, NisError
from .report import ReportOptions, write_report
from .rng import RandomStreams
from .training import baseline_train, build_model, train

_logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "NISQUEEZE_OUTPUT_DIR"
DEFAULT_OUTPUT_DIR = "out"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_IO = 4


@dataclass(frozen=True)
class RunConfig:
    command: str
    output_dir: Path
    seed: int = 0
    dataset: Optional[Path] = None
    checkpoint: Optional[Path] = None
    generator_params: Any = None
    train: TrainConfig = field(default_factory=TrainConfig)
    ei: EiConfig = field(default_factory=EiConfig)
    restart_seeds: Tuple[int, ...] = ()

    def validate(self) -> "RunConfig":
        """Check every input path and the output directory before any work starts."""
        for path in (self.dataset, self.checkpoint):
            if path is not None and not path.is_file():
                raise DatasetError(f"no such file: {path}")
        if self.output_dir.exists() and not self.output_dir.is_dir():
            raise DatasetError(f"output location {self.output_dir} is not a directory")
        if self.seed < 0:
            raise ConfigurationError(f"seed must be non-negative, got {self.seed}")
        if any(s < 0 for s in self.restart_seeds):
            raise ConfigurationError(f"restart seeds must be non-negative, got {list(self.restart_seeds)}")
        self.train.validate()
        self.ei.validate()
        if hasattr(self.generator_params, "validate"):
            self.generator_params.validate()
        return self


def _float_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from e


def _int_list(text: str) -> Tuple[int, ...]:
    try:
        return tuple(int(v) for v in text.split(","))
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _default_output_dir() -> Path:
    return Path(os.environ.get(OUTPUT_DIR_ENV) or DEFAULT_OUTPUT_DIR)


def _add_train_options(parser: argparse.ArgumentParser) -> None:
    defaults = TrainConfig()
    group = parser.add_argument_group("training")
    group.add_argument("--epochs", type=int, default=defaults.epochs)
    group.add_argument("--batch-size", type=int, default=defaults.batch_size)
    group.add_argument("--lr", type=float, default=defaults.learning_rate, help="learning rate")
    group.add_argument(
        "--optimizer", choices=[k.value for k in OptimizerKind], default=defaults.optimizer.value
    )
    group.add_argument("--norm", type=int, choices=(1, 2), default=defaults.norm, help="L1 or L2 prediction loss")
    group.add_argument("--hidden", type=int, default=defaults.hidden, help="hidden width of every small net")
    group.add_argument("--blocks", type=int, default=defaults.blocks, help="number of coupling blocks")
    group.add_argument("--clamp", type=float, default=defaults.clamp, help="soft clamp of coupling log-scales")
    group.add_argument("--grad-clip", type=float, default=defaults.grad_clip)
    group.add_argument("--validation-fraction", type=float, default=defaults.validation_fraction)
    group.add_argument("--log-every", type=int, default=defaults.log_every)


def _add_ei_options(parser: argparse.ArgumentParser) -> None:
    defaults = EiConfig()
    group = parser.add_argument_group("effective information")
    group.add_argument("--L", dest="cube", type=float, default=defaults.L, help="half-width of the intervention cube")
    group.add_argument("--samples", type=int, default=defaults.n_samples, help="Monte-Carlo samples")
    group.add_argument("--ei-seed", type=int, help="Monte-Carlo seed (default: derived from --seed)")
    group.add_argument("--full-entropy", action="store_true", help="use the complete Gaussian entropy constant")
    group.add_argument("--bits", action="store_true", help="print EI in bits instead of nats")


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument(
        "-o",
        "--output-dir",
        type=Path,
        default=None,
        help=f"output directory (default: ${OUTPUT_DIR_ENV} or ./{DEFAULT_OUTPUT_DIR})",
    )
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="log debug messages")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="log warnings and errors only")
    common.add_argument("--seed", type=int, default=0, help="root seed of every random stream")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME, description="Neural information squeezer experiments.", allow_abbrev=False
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_options()

    def add_command(name: str, help: str) -> argparse.ArgumentParser:  # noqa: A002
        return sub.add_parser(name, help=help, parents=[common], allow_abbrev=False)

    generate = add_command("generate", help="generate a transition-pair dataset")
    generate.add_argument("generator", choices=("spring", "markov", "boolnet"))
    generate.add_argument("--batches", type=int)
    generate.add_argument("--per-batch", type=int)
    generate.add_argument("--sigma", type=_float_list, help="spring sensor noise, e.g. 0.1,0.1")
    generate.add_argument("--dt", type=float, help="spring time step")
    generate.add_argument("--table", type=Path, help="JSON mechanism table of the Boolean network")
    generate.add_argument("--workers", type=int, default=1)
    generate.add_argument("--out", type=Path, help="dataset CSV path (default: <output-dir>/<generator>.csv)")

    train_cmd = add_command("train", help="train one squeezer")
    train_cmd.add_argument("dataset", type=Path)
    train_cmd.add_argument("--q", type=int, required=True, help="macro dimension")
    train_cmd.add_argument("--baseline", action="store_true", help="also train the parameter-matched baseline")
    train_cmd.add_argument("--out", type=Path, help="checkpoint path (default: <output-dir>/nis_q<q>.json)")
    _add_train_options(train_cmd)

    sweep = add_command("sweep", help="train one squeezer per q and judge causal emergence")
    sweep.add_argument("dataset", type=Path)
    sweep.add_argument(
        "--seeds", type=_int_list, help="restart seeds, e.g. 0,1,2 (default: one seed derived from --seed)"
    )
    sweep.add_argument("--max-q", type=int)
    sweep.add_argument("--workers", type=int, default=1, help="train q values in parallel processes")
    sweep.add_argument("--noise-floor", type=float, default=DEFAULT_NOISE_FLOOR)
    _add_train_options(sweep)
    _add_ei_options(sweep)

    report = add_command("report", help="write plot data for a trained squeezer")
    report.add_argument("checkpoint", type=Path)
    report.add_argument("dataset", type=Path)
    report.add_argument("--baseline", type=Path, help="baseline checkpoint to add to the rollout")
    report.add_argument("--steps", type=int, default=ReportOptions.steps)
    report.add_argument("--max-points", type=int, default=ReportOptions.max_points)
    report.add_argument("--stochastic", action="store_true", help="sample the dropped coordinates in rollouts")
    return parser


def _train_config(args: argparse.Namespace) -> TrainConfig:
    return TrainConfig(
        epochs=args.epochs,
        batch_size=args.batch_size,
        learning_rate=args.lr,
        optimizer=OptimizerKind(args.optimizer),
        seed=args.seed,
        norm=args.norm,
        grad_clip=args.grad_clip,
        validation_fraction=args.validation_fraction,
        hidden=args.hidden,
        blocks=args.blocks,
        clamp=args.clamp,
        log_every=args.log_every,
    )


def _generator_params(args: argparse.Namespace) -> Any:
    counts = {
        k: v for k, v in (("batches", args.batches), ("per_batch", args.per_batch)) if v is not None
    }
    if args.generator == "spring":
        spring = SpringParams(seed=args.seed, **counts)
        if args.sigma is not None:
            spring = replace(spring, sigma=args.sigma)
        if args.dt is not None:
            spring = replace(spring, dt=args.dt)
        return spring
    if args.generator == "markov":
        return MarkovParams(seed=args.seed, **counts)
    boolnet = BoolNetParams(seed=args.seed, **counts)
    if args.table is not None:
        boolnet = load_mechanism_table(args.table, boolnet)
    return boolnet


def make_run_config(args: argparse.Namespace) -> RunConfig:
    output_dir = args.output_dir if args.output_dir is not None else _default_output_dir()
    config = RunConfig(command=args.command, output_dir=output_dir, seed=args.seed)
    if args.command == "generate":
        if args.table is not None and not args.table.is_file():
            raise DatasetError(f"no such file: {args.table}")
        config = replace(config, generator_params=_generator_params(args))
    elif args.command in ("train", "sweep"):
        config = replace(config, dataset=args.dataset, train=_train_config(args))
        if args.command == "sweep":
            # unset seeds come from the root seed so --seed drives every stream of the sweep
            streams = RandomStreams(max(args.seed, 0))
            seeds = args.seeds if args.seeds is not None else (streams.derive_seed("trainer.restart", 0),)
            ei_seed = args.ei_seed if args.ei_seed is not None else streams.derive_seed("ei")
            config = replace(
                config,
                ei=EiConfig(L=args.cube, n_samples=args.samples, seed=ei_seed, full_entropy=args.full_entropy),
                restart_seeds=tuple(seeds),
            )
    elif args.command == "report":
        config = replace(config, dataset=args.dataset, checkpoint=args.checkpoint)
        if args.baseline is not None and not args.baseline.is_file():
            raise DatasetError(f"no such file: {args.baseline}")
    return config.validate()


def _loss_curve_path(checkpoint_path: Path) -> Path:
    return checkpoint_path.with_name(checkpoint_path.stem + ".loss.csv")


def write_loss_curve(path: Path, history: TrainingHistory, header: Dict[str, Any]) -> Path:
    write_csv(path, pd.DataFrame(history.to_columns()), header)
    return path


def _save_trained(path: Path, checkpoint: Checkpoint) -> None:
    save_checkpoint(path, checkpoint)
    loss_path = write_loss_curve(_loss_curve_path(path), checkpoint.history, checkpoint.header)
    print(f"{checkpoint.kind.value}: validation loss {checkpoint.val_loss:.6g} -> {path} (loss curve {loss_path})")


def cmd_generate(config: RunConfig, args: argparse.Namespace) -> int:
    generators: Dict[str, Callable[..., TransitionPairs]] = {
        "spring": gen_spring,
        "markov": gen_markov,
        "boolnet": gen_boolnet,
    }
    pairs = generators[args.generator](config.generator_params, workers=args.workers)
    out = args.out if args.out is not None else config.output_dir / f"{args.generator}.csv"
    path, sidecar = write_dataset(out, pairs)
    print(f"{len(pairs)} pairs, p={pairs.p} -> {path} ({sidecar.name})")
    if pairs.metadata.illustrative:
        _logger.warning("the default Boolean mechanism table is illustrative; pass --table to use your own")
    return EXIT_OK


def cmd_train(config: RunConfig, args: argparse.Namespace) -> int:
    assert config.dataset is not None
    dataset = read_dataset(config.dataset)
    model = build_model(dataset.p, args.q, config.train)
    checkpoint = train(model, dataset, config.train)
    out = args.out if args.out is not None else config.output_dir / f"nis_q{args.q}.json"
    _save_trained(out, checkpoint)
    if args.baseline:
        baseline = baseline_train(dataset, config.train, checkpoint.num_parameters())
        _save_trained(out.with_name(out.stem + ".baseline.json"), baseline)
    return EXIT_OK


def format_sweep(result: SweepResult, bits: bool = False) -> List[str]:
    unit, scale = ("bits", 1.0 / math.log(2.0)) if bits else ("nats", 1.0)
    lines = [f"{'q':>3} {'EI [' + unit + ']':>14} {'Eff':>10} {'stderr':>10}"]
    for _, row in sweep_frame(result).iterrows():
        ei, stderr = row["EI"] * scale, row["stderr"] * scale
        lines.append(f"{int(row['q']):>3} {ei:>14.6g} {row['Eff']:>10.4g} {stderr:>10.3g}")
    return lines + verdict_lines(result)


def cmd_sweep(config: RunConfig, args: argparse.Namespace) -> int:
    assert config.dataset is not None
    dataset = read_dataset(config.dataset)
    result = sweep_q(
        dataset,
        config.train,
        config.ei,
        config.restart_seeds,
        max_q=args.max_q,
        workers=args.workers,
        noise_floor=args.noise_floor,
    )
    seeds = list(config.restart_seeds)
    header = artifact_header(config.seed, config.train, config.ei, dataset.metadata, seeds)
    header.update(restart_seeds=",".join(str(s) for s in seeds), ei_seed=config.ei.seed)
    paths = write_sweep(config.output_dir, result, header)
    for q, checkpoint in sorted(result.checkpoints.items()):
        save_checkpoint(config.output_dir / "checkpoints" / f"nis_q{q}.json", checkpoint)
    for warning in result.warnings:
        print(f"warning: {warning}", file=sys.stderr)
    print("\n".join(format_sweep(result, args.bits)))
    print(f"-> {paths['csv']}")
    return EXIT_OK


def cmd_report(config: RunConfig, args: argparse.Namespace) -> int:
    assert config.dataset is not None and config.checkpoint is not None
    checkpoint = load_checkpoint(config.checkpoint)
    dataset = read_dataset(config.dataset)
    baseline = load_checkpoint(args.baseline) if args.baseline is not None else None
    options = ReportOptions(
        steps=args.steps, max_points=args.max_points, deterministic=not args.stochastic, seed=config.seed
    )
    paths = write_report(config.output_dir, checkpoint, dataset, options, baseline)
    for name, path in paths.items():
        print(f"{name}: {path}")
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, argparse.Namespace], int]] = {
    "generate": cmd_generate,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "report": cmd_report,
}


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose, args.quiet)
    try:
        config = make_run_config(args)
        return COMMANDS[config.command](config, args)
    except NisError as e:
        _logger.error("%s", e)
        return e.exit_code
    except OSError as e:
        _logger.error("%s", e)
        return EXIT_IO
