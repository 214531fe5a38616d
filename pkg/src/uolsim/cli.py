"""Command-line surface: reproducible experiments to flat files.

Subcommands: run, regret, diag, construct, color, closure. Every run is a
pure function of its config; ``--dump-config`` materializes all defaults
into a diff-able key=value file that reloads to an equivalent run.

Exit codes: 0 success, 2 config/input error, 3 fuel abort, 4 realizability
contract violation.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import adversaries, classes, engine, learners
from .classes import GraphNotColorable, ImproperColoring, NotExtendable, UndefinedAt
from .core import Hypothesis, HypothesisClass, SearchExhausted, closure_extendable
from .progmodel import EventuallyConstant, FuelExhausted, load_program_file, parse_term

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_FUEL = 3
EXIT_CONTRACT = 4


class ConfigError(Exception):
    pass


_DEFAULTS = {
    "run": {"class": "singletons", "learner": "enumeration",
            "adversary": "fixed:zeros", "rounds": "50", "seed": "0",
            "fuel": "1000000", "audit": "auto", "registry": "default", "out": ""},
    "regret": {"class": "singletons", "learner": "ewa",
               "adversary": "stream:alternating@0", "rounds": "256",
               "trials": "20", "seed": "0", "fuel": "1000000",
               "pool_size": "8", "registry": "default", "out": ""},
    "diag": {"registry": "default", "rounds": "100", "seed": "0",
             "fuel": "1000000", "out": ""},
    "construct": {"registry": "default", "timesteps": "200", "fuel_mult": "1",
                  "seed": "0", "out": ""},
    "color": {"graph": "", "rounds": "30", "target_index": "0", "seed": "0",
              "out": ""},
    "closure": {"class": "singletons", "max_len": "6", "registry": "default",
                "graph": "", "out": ""},
}


def parse_config_text(text: str) -> dict:
    cfg = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"bad config line {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        cfg[key] = value
    return cfg


def materialize(command: str, file_cfg: dict, overrides: dict) -> dict:
    """Defaults, then config file, then explicit flags; fully materialized."""
    cfg = dict(_DEFAULTS[command])
    prefix = command + "."
    for key, value in file_cfg.items():
        if key == "command":
            continue
        if not key.startswith(prefix):
            raise ConfigError(f"config key {key!r} does not belong to {command!r}")
        name = key[len(prefix):]
        if name not in cfg:
            raise ConfigError(f"unknown config key {key!r}")
        cfg[name] = value
    for name, value in overrides.items():
        if value is not None:
            if name not in cfg:
                raise ConfigError(f"flag --{name} does not apply to {command!r}")
            cfg[name] = str(value)
    return cfg


def dump_config(command: str, cfg: dict) -> str:
    lines = [f"command = {command}"]
    for name in sorted(cfg):
        lines.append(f"{command}.{name} = {cfg[name]}")
    return "\n".join(lines) + "\n"


def _int(cfg, key):
    try:
        return int(cfg[key])
    except ValueError:
        raise ConfigError(f"{key} must be an integer, got {cfg[key]!r}") from None


def _registry(cfg) -> "learners.LearnerRegistry":
    spec = cfg.get("registry", "default")
    if spec == "default":
        return learners.default_registry()
    try:
        return learners.load_registry(spec)
    except (OSError, KeyError, ValueError) as exc:
        raise ConfigError(f"cannot load registry {spec!r}: {exc}") from None


def build_class(cfg) -> HypothesisClass:
    spec = cfg["class"]
    if spec in classes._BUILTINS:
        return classes.builtin_class(spec)
    if spec.startswith("tree:"):
        rest = spec[5:]
        try:
            if rest.startswith("@"):
                tree = classes.load_tree(rest[1:])
            else:
                tree = classes.named_tree(rest)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot build tree {rest!r}: {exc}") from None
        return classes.tree_class(tree)
    if spec.startswith("explicit:@"):
        path = spec[10:]
        try:
            terms = load_program_file(path)
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load program file {path!r}: {exc}") from None
        hyps = [Hypothesis(t, fuel=_int(cfg, "fuel") if cfg.get("fuel") else None,
                           name=f"prog{i}") for i, t in enumerate(terms)]
        if not hyps:
            raise ConfigError(f"program file {path!r} is empty")
        return classes.explicit_finite(hyps, name=path)
    if spec == "evil":
        fuel = _int(cfg, "fuel") if cfg.get("fuel") else 10**6
        return classes.evil_class(_registry(cfg), fuel=fuel)
    if spec.startswith("coloring"):
        path = spec[9:] if spec.startswith("coloring:") else cfg.get("graph", "")
        if not path:
            raise ConfigError("coloring class needs a graph file")
        try:
            return classes.coloring_class(classes.load_graph(path))
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load graph {path!r}: {exc}") from None
    raise ConfigError(f"unknown class {spec!r}")


def build_target(spec: str, cfg, cls: HypothesisClass) -> Hypothesis:
    if spec == "zeros":
        return Hypothesis(EventuallyConstant("", 0), name="zeros")
    if spec == "ones":
        return Hypothesis(EventuallyConstant("", 1), name="ones")
    if spec.startswith("singleton@"):
        return classes.singleton_hypothesis(int(spec.split("@", 1)[1]))
    if spec.startswith("threshold@"):
        return classes.threshold_hypothesis(int(spec.split("@", 1)[1]))
    if spec.startswith("intthreshold@"):
        return classes.threshold_hypothesis(int(spec.split("@", 1)[1]), "int")
    if spec.startswith("word:"):
        parts = spec.split(":")
        tail = int(parts[2]) if len(parts) > 2 else 0
        return Hypothesis(EventuallyConstant(parts[1], tail), name=spec)
    if spec.startswith("evilseq:"):
        n = int(spec.split(":", 1)[1])
        seq = classes.EvilSequence(_registry(cfg), n)
        return Hypothesis(seq.bit, name=f"evil[{n}]")
    if spec.startswith("member:"):
        idx = int(spec.split(":", 1)[1])
        for i, h in enumerate(cls.enumerate()):
            if i == idx:
                return h
        raise ConfigError(f"class has no member {idx}")
    if spec.startswith("term:"):
        try:
            return Hypothesis(parse_term(spec[5:]), name=spec)
        except ValueError as exc:
            raise ConfigError(f"bad term {spec!r}: {exc}") from None
    raise ConfigError(f"unknown target {spec!r}")


def build_adversary(cfg, cls: HypothesisClass) -> adversaries.Adversary:
    spec = cfg["adversary"]
    if spec.startswith("fixed:"):
        target = build_target(spec[6:], cfg, cls)
        return adversaries.fixed_target(target, audit_class=cls)
    if spec == "worst_case":
        return adversaries.worst_case(cls)
    if spec.startswith("evil:"):
        n = int(spec.split(":", 1)[1])
        return adversaries.evil_adversary(n, _registry(cfg), audit_class=cls)
    if spec.startswith("stream:"):
        rest = spec[7:]
        if rest.startswith("alternating@"):
            return adversaries.alternating_stream(int(rest.split("@", 1)[1]))
        if rest.startswith("noisy:"):
            _, target_spec, rate = rest.split(":")
            target = build_target(target_spec, cfg, cls)
            return adversaries.noisy_target_stream(target, float(rate), _int(cfg, "seed"))
        raise ConfigError(f"unknown stream {rest!r}")
    raise ConfigError(f"unknown adversary {spec!r}")


def build_learner(cfg, cls: HypothesisClass) -> learners.Learner:
    spec = cfg["learner"]
    if spec == "enumeration":
        return learners.class_learner(cls)
    if spec == "proper":
        try:
            return learners.proper_learner(cls)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
    if spec == "evil":
        return learners.EvilClassLearner(_registry(cfg))
    if spec == "ewa":
        pool = _pool(cfg, cls)
        return learners.ewa_doubling(pool)
    if spec.startswith("constant:"):
        return learners.constant_learner(int(spec.split(":", 1)[1]))
    if spec == "parity":
        return learners.parity_learner()
    if spec == "last_label":
        return learners.last_label_learner()
    if spec == "coin_flip":
        return learners.coin_flip_learner()
    if spec.startswith("derand:"):
        inner_cfg = dict(cfg)
        inner_cfg["learner"] = spec.split(":", 1)[1]
        return learners.derandomize(build_learner(inner_cfg, cls))
    raise ConfigError(f"unknown learner {spec!r}")


def _pool(cfg, cls: HypothesisClass) -> list:
    size = _int(cfg, "pool_size") if "pool_size" in cfg else 8
    source = cls.closure_members if cls.closure_members is not None else cls.members
    pool = []
    for h in source():
        if len(pool) >= size:
            break
        pool.append(h)
    if not pool:
        raise ConfigError("empty expert pool")
    return pool


def _emit(cfg, text: str) -> None:
    if cfg.get("out"):
        with open(cfg["out"], "w", encoding="ascii", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_run(cfg) -> int:
    cls = build_class(cfg)
    learner = build_learner(cfg, cls)
    adversary = build_adversary(cfg, cls)
    transcript = engine.run_game(
        learner, adversary, _int(cfg, "rounds"),
        fuel=_int(cfg, "fuel"), seed=_int(cfg, "seed"), audit=cfg["audit"],
    )
    _emit(cfg, "\n".join(transcript.to_lines()) + "\n")
    if transcript.aborted:
        print(f"aborted: {transcript.abort_reason}", file=sys.stderr)
        return EXIT_FUEL
    if adversary.realizable_contract and any(r.audit == "no" for r in transcript.rounds):
        print("realizability contract violated", file=sys.stderr)
        return EXIT_CONTRACT
    return EXIT_OK


def cmd_regret(cfg) -> int:
    cls = build_class(cfg)
    learner = build_learner(cfg, cls)
    adversary = build_adversary(cfg, cls)
    rounds = _int(cfg, "rounds")
    pool = _pool(cfg, cls)
    if learner.randomized:
        report, transcripts = engine.estimate_expected(
            learner, adversary, rounds, _int(cfg, "trials"),
            seed=_int(cfg, "seed"), pool=pool,
        )
        lines = ["n,learner_loss,best_loss,regret,regret_over_n,se"]
        for i in range(rounds):
            reg = report.mean_regret[i]
            lines.append(
                f"{i + 1},{report.mean_mistakes[i]:.6f},"
                f"{report.mean_mistakes[i] - reg:.6f},{reg:.6f},"
                f"{reg / (i + 1):.6f},{report.se_regret[i]:.6f}"
            )
        _emit(cfg, "\n".join(lines) + "\n")
        if cfg.get("out"):
            rows = engine.block_regret_table(transcripts, pool)
            block_lines = ["k,start,length,active_experts,mean_regret,se_regret"]
            for row in rows:
                block_lines.append(
                    f"{row.k},{row.start},{row.length},{row.active_experts},"
                    f"{row.mean_regret:.6f},{row.se_regret:.6f}"
                )
            with open(cfg["out"] + ".blocks.csv", "w", encoding="ascii", newline="\n") as fh:
                fh.write("\n".join(block_lines) + "\n")
        return EXIT_OK
    transcript = engine.run_game(learner, adversary, rounds,
                                 fuel=_int(cfg, "fuel"), seed=_int(cfg, "seed"))
    if transcript.aborted:
        print(f"aborted: {transcript.abort_reason}", file=sys.stderr)
        return EXIT_FUEL
    _emit(cfg, engine.regret_report(transcript, pool).to_csv())
    return EXIT_OK


def cmd_diag(cfg) -> int:
    registry = _registry(cfg)
    rounds = _int(cfg, "rounds")
    lines = [f"registry\t{len(registry)}", f"rounds\t{rounds}"]
    words = {}
    evil_learner = learners.EvilClassLearner(registry)
    for n in registry.total_indices():
        adversary = adversaries.evil_adversary(n, registry)
        own = engine.run_game(learners.RegistryLearner(registry[n]), adversary, rounds)
        late = [r for r in own.rounds if r.t > n]
        forced = all(r.mistake == 1 for r in late)
        countered = engine.run_game(evil_learner, adversary, rounds)
        words[n] = own.word()
        lines.append(
            f"entry\t{n}\t{registry[n].name}\tmistakes_self={own.mistakes()}"
            f"\tforced_after_n={'yes' if forced else 'NO'}"
            f"\tmistakes_evil_learner={countered.mistakes()}\tbound={n + 2}"
        )
    distinct = len(set(words.values())) == len(words)
    lines.append(f"unique_words\t{'yes' if distinct else 'NO'}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_construct(cfg) -> int:
    registry = _registry(cfg)
    mult = _int(cfg, "fuel_mult")
    trace = classes.priority_construct(
        registry, _int(cfg, "timesteps"), fuel_schedule=lambda s: mult * s,
    )
    _emit(cfg, "\n".join(trace.to_lines()) + "\n")
    return EXIT_OK


def cmd_color(cfg) -> int:
    if not cfg.get("graph"):
        raise ConfigError("color needs a graph file")
    try:
        graph = classes.load_graph(cfg["graph"])
        cls = classes.coloring_class(graph)
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot load graph: {exc}") from None
    totals = classes.all_colorings(graph)
    lines = [f"graph\t{graph.n}\t{graph.k}", f"colorings\t{len(totals)}"]
    least = totals[0]
    for m in range(graph.n + 1):
        ext = classes.extension_operator(graph, least[:m])
        lines.append(f"extend\t{''.join(map(str, least[:m])) or '-'}\t{''.join(map(str, ext))}")
    idx = _int(cfg, "target_index")
    if not 0 <= idx < len(totals):
        raise ConfigError(f"target_index {idx} out of range (have {len(totals)})")
    target = classes.coloring_hypothesis(graph, totals[idx])
    learner = learners.class_learner(cls, capped=False)
    adversary = adversaries.fixed_target(
        target, order=adversaries.cyclic_order(graph.n), audit_class=cls)
    transcript = engine.run_game(learner, adversary, _int(cfg, "rounds"))
    final_third = transcript.rounds[2 * len(transcript.rounds) // 3:]
    lines.append(f"game\ttarget={idx}\tmistakes={transcript.mistakes()}"
                 f"\tfinal_third_mistakes={sum(r.mistake for r in final_third)}")
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_closure(cfg) -> int:
    cls = build_class(cfg)
    max_len = _int(cfg, "max_len")
    alphabet = "01" if cls.label_arity == 2 else "".join(
        str(c) for c in range(1, cls.label_arity + 1))
    lines = [f"class\t{cls.name}", f"alphabet\t{alphabet}"]
    frontier = [""]
    for _ in range(max_len + 1):
        for w in frontier:
            verdict = closure_extendable(cls, w).verdict
            lines.append(f"word\t{w or '-'}\t{verdict}")
        frontier = [w + c for w in frontier for c in alphabet]
    _emit(cfg, "\n".join(lines) + "\n")
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "regret": cmd_regret,
    "diag": cmd_diag,
    "construct": cmd_construct,
    "color": cmd_color,
    "closure": cmd_closure,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="uolsim",
                                     description="online learning game simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    flags = {
        "run": ["class", "learner", "adversary", "rounds", "seed", "fuel",
                "audit", "registry", "out"],
        "regret": ["class", "learner", "adversary", "rounds", "trials", "seed",
                   "fuel", "pool_size", "registry", "out"],
        "diag": ["registry", "rounds", "seed", "fuel", "out"],
        "construct": ["registry", "timesteps", "fuel_mult", "seed", "out"],
        "color": ["graph", "rounds", "target_index", "seed", "out"],
        "closure": ["class", "max_len", "registry", "graph", "out"],
    }
    for name, keys in flags.items():
        p = sub.add_parser(name)
        for key in keys:
            p.add_argument(f"--{key.replace('_', '-')}", dest=key, default=None)
        p.add_argument("--config", default=None)
        p.add_argument("--dump-config", dest="dump_config", default=None)
    return parser


def main(argv: Optional[list] = None) -> int:
    args = _build_parser().parse_args(argv)
    command = args.command
    try:
        file_cfg = {}
        if args.config:
            try:
                with open(args.config, "r", encoding="ascii") as fh:
                    file_cfg = parse_config_text(fh.read())
            except OSError as exc:
                raise ConfigError(f"cannot read config: {exc}") from None
            declared = file_cfg.get("command")
            if declared is not None and declared != command:
                raise ConfigError(f"config is for {declared!r}, not {command!r}")
        overrides = {k: v for k, v in vars(args).items()
                     if k not in ("command", "config", "dump_config")}
        cfg = materialize(command, file_cfg, overrides)
        if args.dump_config:
            with open(args.dump_config, "w", encoding="ascii", newline="\n") as fh:
                fh.write(dump_config(command, cfg))
            return EXIT_OK
        return _COMMANDS[command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (GraphNotColorable, ImproperColoring, NotExtendable) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FuelExhausted, SearchExhausted, UndefinedAt) as exc:
        print(f"fuel/search abort: {exc}", file=sys.stderr)
        return EXIT_FUEL


def console() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
