"""Command-line interface: generate, mine, eval, check, suggest.

Exit codes: 0 success, 1 consistency failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from .datagen import GenParams, extend_complex, extend_simple, gen_synthetic_rbac, expand_to_tupa
from .errors import ConfigError, DomainError, ParseError, ResourceError
from .metrics import (
    MetricKind,
    MetricSpec,
    WscWeights,
    co_trap,
    format_attributes,
    interpretability,
    read_attributes,
    suggest_roles,
    wsc,
)
from .miner import InitVariant, MinerConfig, mine
from .policy import (
    InheritanceType,
    check_full_inheritance,
    format_policy,
    over_granted,
    policy_meaning,
    read_policy,
    read_tupa,
    uncovered_triples,
    write_policy,
    write_tupa,
)

EXIT_OK, EXIT_INCONSISTENT, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _num(x) -> object:
    """JSON-friendly rendering of a Fraction."""
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else str(x)
    return x


# -- generate ---------------------------------------------------------------------

def _generate_one(params: GenParams, style: str, it: InheritanceType, k: int, out: Path) -> None:
    rbac, _ = gen_synthetic_rbac(params)
    extend = extend_simple if style == "simple" else extend_complex
    policy = extend(rbac, params.seed + k, it)
    name = f"run-{k:03d}"
    write_policy(policy, out / "policies" / f"{name}.json")
    write_tupa(expand_to_tupa(policy), out / "tupas" / f"{name}.tsv")


def cmd_generate(args) -> int:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{args.config}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError(f"{args.config}: expected a JSON object")
    params = GenParams.from_dict(raw)
    if args.n < 1:
        raise UsageError("--n must be at least 1")
    it = InheritanceType.parse(args.it)
    out = Path(args.out)
    (out / "policies").mkdir(parents=True, exist_ok=True)
    (out / "tupas").mkdir(parents=True, exist_ok=True)
    # one planted RBAC policy, extended with fresh temporal data per run
    _, attrs = gen_synthetic_rbac(params)
    (out / "attrs.csv").write_text(format_attributes(attrs), encoding="utf-8")
    manifest = {"params": params.to_dict(), "style": args.style, "it": it.value, "n": args.n,
                "run_seeds": [params.seed + k for k in range(args.n)]}
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n", encoding="utf-8")
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            futures = [pool.submit(_generate_one, params, args.style, it, k, out) for k in range(args.n)]
            for f in futures:
                f.result()
    else:
        for k in range(args.n):
            _generate_one(params, args.style, it, k, out)
    print(f"wrote {args.n} policies and TUPAs to {out}")
    return EXIT_OK


# -- mine ----------------------------------------------------------------------------

def _metric_from_args(args) -> MetricSpec:
    return MetricSpec(MetricKind(args.metric), WscWeights.parse(args.weights),
                      Fraction(args.w_ta), Fraction(args.w_pa))


def _config_from_args(args) -> MinerConfig:
    try:
        delta = Fraction(args.delta)
        ric = Fraction(args.ric)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return MinerConfig(it=InheritanceType.parse(args.it), epsilon=args.epsilon, delta=delta, ric=ric,
                       metric=_metric_from_args(args), init_variant=InitVariant(args.init_variant),
                       seed=args.seed, debug=args.debug)


def run_report(policy, T, config: MinerConfig, attrs, trace, seconds: float) -> dict:
    uncovered = uncovered_triples(T, policy)
    report = {
        "metric": config.metric.kind.value,
        "seed": config.seed,
        "config": {
            "it": config.it.value, "epsilon": config.epsilon, "delta": str(config.delta),
            "ric": str(config.ric), "init_variant": config.init_variant.value,
            "weights": [str(w) for w in (config.metric.weights.w1, config.metric.weights.w2,
                                         config.metric.weights.w3, config.metric.weights.w4,
                                         config.metric.weights.w5)],
            "w_ta": str(config.metric.w_ta), "w_pa": str(config.metric.w_pa),
        },
        "roles": len(policy.roles),
        "wsc": _num(wsc(policy, config.metric.weights)),
        "co_trap": _num(co_trap(policy, config.metric.w_ta, config.metric.w_pa)),
        "int": interpretability(policy, attrs) if attrs is not None else None,
        "uncovered": len(uncovered),
        "seconds": round(seconds, 6),
        "trace": [{"role": s.role, "accepted": s.accepted, "before": [_num(x) for x in s.before],
                   "after": [_num(x) for x in s.after]} for s in trace],
    }
    return report


def cmd_mine(args) -> int:
    config = _config_from_args(args)
    T = read_tupa(args.tupa)
    attrs = read_attributes(args.attrs) if args.attrs else None
    if config.metric.needs_attributes and attrs is None:
        raise UsageError(f"metric {config.metric.kind.value} needs --attrs")
    t0 = time.perf_counter()
    result = mine(T, config, attrs)
    seconds = time.perf_counter() - t0
    policy = result.policy
    report = run_report(policy, T, config, attrs, result.trace, seconds)
    # timing is the only non-reproducible field; keep it out of the policy file
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        write_policy(policy, args.out)
    else:
        sys.stdout.write(format_policy(policy))
    if args.report:
        Path(args.report).parent.mkdir(parents=True, exist_ok=True)
        Path(args.report).write_text(json.dumps(report, indent=1) + "\n", encoding="utf-8")
    for k in ("metric", "roles", "wsc", "int", "co_trap", "uncovered", "seconds"):
        print(f"{k:<10} {report[k]}", file=sys.stderr)
    granted_extra = over_granted(T, policy)
    if report["uncovered"] > config.epsilon or granted_extra:
        print(f"consistency failure: {report['uncovered']} uncovered, {len(granted_extra)} over-granted",
              file=sys.stderr)
        return EXIT_INCONSISTENT
    if not check_full_inheritance(policy):
        print("consistency failure: hierarchy is missing an inheritance edge", file=sys.stderr)
        return EXIT_INCONSISTENT
    return EXIT_OK


# -- eval ------------------------------------------------------------------------------

def summarize(values: Sequence[float]) -> Dict[str, Optional[float]]:
    """Mean, sample standard deviation and 95% CI half-width (Student's t)."""
    from scipy import stats

    n = len(values)
    mean = sum(values) / n
    if n < 2:
        return {"n": n, "mean": mean, "std": None, "ci": None}
    std = math.sqrt(sum((v - mean) ** 2 for v in values) / (n - 1))
    ci = float(stats.t.ppf(0.975, n - 1)) * std / math.sqrt(n)
    return {"n": n, "mean": mean, "std": std, "ci": ci}


def _policy_files(d: Path) -> Dict[str, Path]:
    if not d.is_dir():
        raise UsageError(f"{d} is not a directory")
    return {p.relative_to(d).as_posix(): p for p in sorted(d.rglob("*.json"))}


def evaluate_runs(original: Path, mined: Path, attrs=None) -> List[dict]:
    orig_files, mined_files = _policy_files(original), _policy_files(mined)
    if not orig_files:
        raise UsageError(f"no policy files under {original}")
    if set(orig_files) != set(mined_files):
        missing = sorted(set(orig_files) ^ set(mined_files))
        raise UsageError(f"run sets differ: {', '.join(missing[:5])}")
    columns: Dict[str, Dict[str, List[float]]] = {}
    for name in sorted(orig_files):
        for which, path in (("original", orig_files[name]), ("mined", mined_files[name])):
            policy = read_policy(path)
            row = {"roles": len(policy.roles), "wsc": float(wsc(policy)), "co_trap": float(co_trap(policy))}
            if attrs is not None:
                row["int"] = interpretability(policy, attrs)
            for metric, v in row.items():
                columns.setdefault(metric, {}).setdefault(which, []).append(float(v))
    rows = []
    for metric in columns:
        for which in ("original", "mined"):
            rows.append({"metric": metric, "policy": which, **summarize(columns[metric][which])})
    return rows


def _fmt(x) -> str:
    return "" if x is None else f"{x:.4g}"


def format_table(rows: List[dict]) -> str:
    head = f"{'metric':<8} {'policy':<9} {'n':>4} {'mean':>10} {'std':>10} {'ci95':>10}"
    lines = [head, "-" * len(head)]
    for r in rows:
        lines.append(f"{r['metric']:<8} {r['policy']:<9} {r['n']:>4} {_fmt(r['mean']):>10} "
                     f"{_fmt(r['std']):>10} {_fmt(r['ci']):>10}")
    return "\n".join(lines) + "\n"


def format_csv(rows: List[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=["metric", "policy", "n", "mean", "std", "ci"], lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: ("" if r[k] is None else r[k]) for k in w.fieldnames})
    return buf.getvalue()


def cmd_eval(args) -> int:
    attrs = read_attributes(args.attrs) if args.attrs else None
    rows = evaluate_runs(Path(args.original), Path(args.mined), attrs)
    sys.stdout.write(format_table(rows))
    if args.csv:
        Path(args.csv).write_text(format_csv(rows), encoding="utf-8")
    return EXIT_OK


# -- check ---------------------------------------------------------------------------------

def cmd_check(args) -> int:
    T = read_tupa(args.tupa)
    policy = read_policy(args.policy)
    meaning = policy_meaning(policy)
    missing = uncovered_triples(T, policy, meaning)
    extra = over_granted(T, policy, meaning)
    for u, p in missing:
        got = meaning.get((u, p))
        print(f"uncovered\t{u}\t{p}\twant {T[(u, p)]}\tgot {got if got is not None else '-'}")
    for u, p in extra:
        want = T.get((u, p))
        print(f"over-granted\t{u}\t{p}\twant {want if want is not None else '-'}\tgot {meaning[(u, p)]}")
    if len(missing) > args.epsilon or extra:
        print(f"FAIL: {len(missing)} uncovered (epsilon {args.epsilon}), {len(extra)} over-granted")
        return EXIT_INCONSISTENT
    print(f"OK: {len(missing)} uncovered (epsilon {args.epsilon})")
    return EXIT_OK


# -- suggest ----------------------------------------------------------------------------------

def _parse_row(text: str) -> Dict[str, int]:
    row = {}
    for part in text.split(","):
        if not part.strip():
            continue
        name, sep, value = part.partition("=")
        if not sep:
            raise UsageError(f"expected attr=value, got {part!r}")
        try:
            row[name.strip()] = int(value)
        except ValueError:
            raise UsageError(f"attribute values are natural numbers, got {value!r}") from None
    return row


def cmd_suggest(args) -> int:
    policy = read_policy(args.policy)
    if not policy.expressions:
        raise UsageError("policy has no stored attribute expressions; mine it with attribute data")
    names = policy.attributes or tuple(sorted({a for conj, _ in policy.expressions.values() for a in conj}))
    rows: Dict[str, Dict[str, int]] = {}
    if args.row:
        rows["new"] = _parse_row(args.row)
    if args.users:
        data = read_attributes(args.users)
        for u in data.users:
            rows[u] = dict(zip(data.attributes, data.values[u]))
    if not rows:
        raise UsageError("give --row or --users")
    for user, row in rows.items():
        picks = suggest_roles(policy, names, row)
        shown = " ".join(f"{rid}(mismatch={mm})" for rid, mm in picks) or "-"
        print(f"{user}\t{shown}")
    return EXIT_OK


# -- entry point ----------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="trbacminer", description="Mine temporal RBAC policies from timed ACLs.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write synthetic policies, TUPAs and attribute data")
    g.add_argument("--config", required=True, help="JSON generation parameters (with a seed field)")
    g.add_argument("--n", type=int, default=1, help="number of temporal extensions")
    g.add_argument("--out", required=True)
    g.add_argument("--style", choices=["simple", "complex"], default="simple")
    g.add_argument("--it", choices=["wr", "sr"], default="wr")
    g.add_argument("--jobs", type=int, default=1)
    g.set_defaults(func=cmd_generate)

    m = sub.add_parser("mine", help="mine a policy from a TUPA")
    m.add_argument("--tupa", required=True)
    m.add_argument("--attrs")
    m.add_argument("--metric", choices=[k.value for k in MetricKind], default="wsc-int")
    m.add_argument("--it", choices=["wr", "sr"], default="wr")
    m.add_argument("--epsilon", type=int, default=0)
    m.add_argument("--delta", default="1.001")
    m.add_argument("--ric", default="1")
    m.add_argument("--weights", default="1,1,1,1,1", help="w1..w5 for roles, UA, PA, RH, TA size")
    m.add_argument("--w-ta", default="1")
    m.add_argument("--w-pa", default="1")
    m.add_argument("--init-variant", choices=[v.value for v in InitVariant], default="perm-bpes")
    m.add_argument("--seed", type=int, default=0)
    m.add_argument("--out", help="policy JSON (stdout when omitted)")
    m.add_argument("--report", help="run report JSON")
    m.add_argument("--debug", action="store_true", help="re-verify incremental state after every step")
    m.set_defaults(func=cmd_mine)

    e = sub.add_parser("eval", help="summarize original vs mined policy quality")
    e.add_argument("--original", required=True, help="directory of original policy JSON files")
    e.add_argument("--mined", required=True, help="directory of mined policy JSON files, same names")
    e.add_argument("--attrs")
    e.add_argument("--csv")
    e.set_defaults(func=cmd_eval)

    c = sub.add_parser("check", help="compare a policy's meaning with a TUPA")
    c.add_argument("--tupa", required=True)
    c.add_argument("--policy", required=True)
    c.add_argument("--epsilon", type=int, default=0)
    c.set_defaults(func=cmd_check)

    s = sub.add_parser("suggest", help="suggest roles for new users from attribute values")
    s.add_argument("--policy", required=True)
    s.add_argument("--row", help="attr=value,... for one new user")
    s.add_argument("--users", help="attribute CSV of new users")
    s.set_defaults(func=cmd_suggest)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError, ParseError, DomainError, ResourceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
