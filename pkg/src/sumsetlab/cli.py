"""Command-line interface.

Exit codes: 0 for clean runs (conjecture findings included), 1 when a
theorem-status law is violated, 2 for usage, parse and resource errors.
Every flag can be defaulted through an environment variable with the
SUMSETLAB_ prefix (SUMSETLAB_GROUP, SUMSETLAB_FORMAT, ...).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import (
    DomainError,
    ParseError,
    ResourceLimitError,
    SumsetLabError,
    UnsupportedOperationError,
    UsageError,
)
from .explorer import (
    Campaign,
    read_records,
    run_campaign,
    summarize,
)
from .groups import backend_from_spec
from .isoperimetry import IsoInstance, kappa_restricted
from .laws import (
    ATOM_LAWS,
    LAW_IDS,
    THEOREM_LAWS,
    check_3k4,
    check_atom_lemmas,
    check_c_lower,
    check_corollary_AB,
    check_equality_characterization,
    check_freiman_dim,
    check_gardner_gronchi,
    check_hls,
    check_kempermann,
    check_main_theorem,
    check_ruzsa_dim,
    check_uvk,
    empirical_c_lower,
    example_klein_grid,
    example_klein_union,
)
from .reports import VERDICT_VIOLATED, subset_payload
from .setops import FiniteSubset, deficiency, product_set

ENV_PREFIX = "SUMSETLAB_"


def _env_default(name: str):
    return os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("text", "json", "csv"),
                        default=_env_default("format") or "text")
    parser.add_argument("--out", default=_env_default("out"))


def _emit(args, lines_text, objects) -> None:
    """Write text lines or one JSON object per line, to stdout or --out."""
    if args.format == "json":
        payload = "\n".join(json.dumps(obj, sort_keys=True) for obj in objects) + "\n"
    else:
        payload = "\n".join(lines_text) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)


def _load_set(backend, path) -> FiniteSubset:
    S = FiniteSubset.from_file(backend, path)
    if len(S) == 0:
        raise DomainError(f"set file {path} holds no elements")
    return S


def _report_lines(report) -> str:
    slack = "" if report.slack is None else f" slack={report.slack}"
    detail = f" ({report.detail})" if report.detail else ""
    return f"{report.law}: {report.verdict}{slack}{detail}"


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return int(args.seed)
    seed = int.from_bytes(os.urandom(4), "big")
    print(f"seed: {seed}", file=sys.stderr)
    return seed


def _cmd_sumset(args) -> int:
    backend = backend_from_spec(args.group)
    A = _load_set(backend, args.a_file)
    B = _load_set(backend, args.b_file)
    AB = product_set(A, B)
    dfc = len(AB) - len(A) - len(B)
    lines = [str(g) for g in AB]
    lines.append(f"|AB| = {len(AB)}")
    lines.append(f"deficiency = {dfc}")
    obj = {"product": subset_payload(AB), "size": len(AB), "deficiency": dfc}
    _emit(args, lines, [obj])
    return 0


def _cmd_kappa(args) -> int:
    backend = backend_from_spec(args.group)
    C = _load_set(backend, args.c_file)
    window = backend.ball(args.radius)
    result = kappa_restricted(IsoInstance(C, args.n, window))
    lines = [
        f"kappa_hat = {result.kappa_hat}",
        f"certificate = {result.certificate}",
        f"atoms = {[ [str(g) for g in U] for U in result.atoms ]}",
    ]
    obj = {
        "kappa_hat": result.kappa_hat,
        "certificate": result.certificate,
        "n": args.n,
        "radius": args.radius,
        "atoms": [subset_payload(U) for U in result.atoms],
        "fragments_sample": [subset_payload(F) for F in result.fragments_sample],
    }
    _emit(args, lines, [obj])
    return 0


def _cmd_verify(args) -> int:
    backend = backend_from_spec(args.group)
    law = args.law
    if law not in LAW_IDS:
        raise UsageError(f"unknown law id {law!r}")

    def need(path, flag):
        if path is None:
            raise UsageError(f"law {law} requires {flag}")
        return _load_set(backend, path)

    if law == "kempermann":
        reports = [check_kempermann(need(args.a_file, "--a-file"), need(args.b_file, "--b-file"))]
    elif law == "hls":
        reports = [check_hls(need(args.a_file, "--a-file"), need(args.b_file, "--b-file"))]
    elif law == "ruzsa_dim":
        reports = [check_ruzsa_dim(need(args.a_file, "--a-file"), need(args.b_file, "--b-file"))]
    elif law == "gardner_gronchi":
        reports = [check_gardner_gronchi(need(args.a_file, "--a-file"), need(args.b_file, "--b-file"))]
    elif law == "freiman_dim":
        reports = [check_freiman_dim(need(args.a_file, "--a-file"))]
    elif law == "3k4":
        reports = [check_3k4(need(args.a_file, "--a-file"))]
    elif law == "corollary_ab":
        reports = [check_corollary_AB(need(args.a_file, "--a-file"))]
    elif law == "equality":
        if args.window_file:
            window = _load_set(backend, args.window_file)
        else:
            window = backend.ball(args.radius)
        reports = [check_equality_characterization(window, (2, args.max_size))]
    elif law == "uvk":
        reports = [check_uvk(need(args.b_file, "--b-file"), args.d)]
    elif law == "main_theorem":
        reports = [check_main_theorem(need(args.a_file, "--a-file"), need(args.b_file, "--b-file"),
                                      args.k, args.general_bound)]
    elif law == "c_lower":
        reports = [check_c_lower(args.k)]
    elif law == "klein_grid":
        reports = [example_klein_grid(args.m)[2]]
    elif law == "klein_union":
        reports = [example_klein_union(args.m)[1]]
    elif law in ATOM_LAWS:
        C = need(args.c_file, "--c-file")
        window = backend.ball(args.radius)
        result = kappa_restricted(IsoInstance(C, args.n, window))
        reports = [r for r in check_atom_lemmas(C, args.n, result) if r.law == law]
    else:
        raise UsageError(f"law {law} has no CLI runner")

    _emit(args, [_report_lines(r) for r in reports], [r.to_dict() for r in reports])
    bad = any(r.verdict == VERDICT_VIOLATED and r.law in THEOREM_LAWS for r in reports)
    return 1 if bad else 0


def _cmd_example(args) -> int:
    if args.name == "klein-grid":
        A, B, report = example_klein_grid(args.m)
        lines = ["A: " + " ".join(str(g) for g in A),
                 f"|B| = {len(B)}",
                 _report_lines(report)]
        obj = {"A": subset_payload(A), "B": subset_payload(B), "report": report.to_dict()}
    elif args.name == "klein-union":
        A, report = example_klein_union(args.m)
        lines = [f"|A| = {len(A)}", _report_lines(report)]
        obj = {"A": subset_payload(A), "report": report.to_dict()}
    elif args.name == "c-lower":
        witness = empirical_c_lower(args.k)
        lines = [f"k = {witness.k}: |B| = {witness.B_size}, deficiency = {witness.deficiency} (m = {witness.m})"]
        obj = {"k": witness.k, "B_size": witness.B_size,
               "deficiency": witness.deficiency, "m": witness.m}
    else:
        raise UsageError(f"unknown example {args.name!r}")
    _emit(args, lines, [obj])
    return 0


def _cmd_explore(args) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if args.seed is not None:
        data["seed"] = int(args.seed)
    elif "seed" not in data:
        data["seed"] = int.from_bytes(os.urandom(4), "big")
        print(f"seed: {data['seed']}", file=sys.stderr)
    if args.jobs is not None:
        data["jobs"] = int(args.jobs)
    campaign = Campaign.from_dict(data)
    run = run_campaign(campaign, store_path=args.out)
    lines = [
        f"campaign = {run.campaign_hash}",
        f"records = {len(run.records)}",
        f"counts = {run.counts}",
        f"clean = {run.clean}",
        f"wall_clock = {run.wall_clock:.3f}s",
    ]
    obj = {
        "campaign": run.campaign_hash,
        "records": len(run.records),
        "counts": run.counts,
        "clean": run.clean,
        "version": run.version,
    }
    if args.format == "json":
        sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    else:
        sys.stdout.write("\n".join(lines) + "\n")
    return 0 if run.clean else 1


def _cmd_report(args) -> int:
    records = read_records(args.run)
    rows = summarize(records)
    header = ["law", "holds", "violated", "hypothesis_not_met", "finding", "skipped",
              "min_slack", "max_slack"]
    if args.format == "json":
        _emit(args, [], rows)
    else:
        csv_lines = [",".join(header)]
        for row in rows:
            csv_lines.append(",".join("" if row[h] is None else str(row[h]) for h in header))
        _emit(args, csv_lines, rows)
    violated = sum(
        1
        for record in records
        if record["report"]["verdict"] == VERDICT_VIOLATED and record["law"] in THEOREM_LAWS
    )
    return 1 if violated else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sumsetlab",
        description="Product sets, progression covers and isoperimetric atoms "
                    "in concrete torsion-free groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    group_kw = dict(default=_env_default("group"), help="group spec: zd:<d>, free:<k>, klein, heis")

    p = sub.add_parser("sumset", help="product set of two set files")
    p.add_argument("a_file")
    p.add_argument("b_file")
    p.add_argument("--group", required=_env_default("group") is None, **group_kw)
    _add_common(p)
    p.set_defaults(func=_cmd_sumset)

    p = sub.add_parser("kappa", help="restricted isoperimetric minimum of a set file")
    p.add_argument("c_file")
    p.add_argument("--group", required=_env_default("group") is None, **group_kw)
    p.add_argument("--n", type=int, default=int(_env_default("n") or 1))
    p.add_argument("--radius", type=int, default=int(_env_default("radius") or 4))
    _add_common(p)
    p.set_defaults(func=_cmd_kappa)

    p = sub.add_parser("verify", help="run one law check")
    p.add_argument("--law", required=True, help="law id, e.g. kempermann")
    p.add_argument("--group", required=_env_default("group") is None, **group_kw)
    p.add_argument("--a-file")
    p.add_argument("--b-file")
    p.add_argument("--c-file")
    p.add_argument("--window-file")
    p.add_argument("--n", type=int, default=int(_env_default("n") or 2))
    p.add_argument("--k", type=int, default=int(_env_default("k") or 1))
    p.add_argument("--d", type=int, default=int(_env_default("d") or 3))
    p.add_argument("--m", type=int, default=int(_env_default("m") or 1))
    p.add_argument("--radius", type=int, default=int(_env_default("radius") or 3))
    p.add_argument("--max-size", type=int, default=4)
    p.add_argument("--general-bound", action="store_true")
    _add_common(p)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("example", help="construct a named example family")
    p.add_argument("--name", required=True, choices=("klein-grid", "klein-union", "c-lower"))
    p.add_argument("--m", type=int, default=int(_env_default("m") or 1))
    p.add_argument("--k", type=int, default=int(_env_default("k") or 1))
    _add_common(p)
    p.set_defaults(func=_cmd_example)

    p = sub.add_parser("explore", help="run a seeded campaign from a config file")
    p.add_argument("--config", required=True, default=_env_default("config"))
    p.add_argument("--seed", default=_env_default("seed"))
    p.add_argument("--jobs", default=_env_default("jobs"))
    _add_common(p)
    p.set_defaults(func=_cmd_explore)

    p = sub.add_parser("report", help="summarize a record store as a table")
    p.add_argument("--run", required=True, help="path to a records JSONL file")
    _add_common(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (UsageError, DomainError, UnsupportedOperationError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SumsetLabError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
