"""Command-line front end: run sessions, run sweeps, verify invariants, inspect bases.

Exit codes are a stable contract: 0 success, 1 usage or spec error, 2 protocol
aborted by detection.  Human summaries go to standard output; machine
artifacts (transcript JSON, sweep CSV, figures) go to files only.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import entropy_bound, sweep, write_sweep_csv, eve_accuracy
from .attacks import parse_attack, parse_attack_family
from .protocol import SessionConfig, run_session
from .quantum import Basis, ghz_basis, ghz_pairs, ket_string, measure_all_density

_SESSION_ROUND_CAP = 1_000_000  # guards the c=1 no-detection corner, which never terminates


def _party_label(k: int) -> str:
    return chr(ord("A") + k)


def _load_spec_text(spec: str | None) -> str | None:
    if spec is not None and spec.startswith("@"):
        return Path(spec[1:]).read_text()
    return spec


def _parse_message(text: str) -> tuple[int, ...]:
    if not text or any(ch not in "01" for ch in text):
        raise ValueError(f"message must be a non-empty bit string of 0s and 1s, got {text!r}")
    return tuple(int(ch) for ch in text)


def cmd_run(args: argparse.Namespace) -> int:
    attack = parse_attack(_load_spec_text(args.attack))
    config = SessionConfig(
        n_parties=args.n,
        control_probability=args.c,
        message_bits=_parse_message(args.message),
        seed=args.seed,
        attack=attack,
    )
    transcript = run_session(config, max_rounds=_SESSION_ROUND_CAP)
    if args.out:
        Path(args.out).write_text(transcript.to_json())
    sent = sum(1 for r in transcript.rounds if r.mode.value == "message")
    summary = (
        f"aborted: detection at round {transcript.abort_round}; "
        f"{sent}/{len(config.message_bits)} message bits sent"
        if transcript.aborted
        else f"completed: {sent}/{len(config.message_bits)} message bits to "
        f"{config.n_parties - 1} receivers in {len(transcript.rounds)} rounds"
    )
    accuracy = eve_accuracy(attack, transcript)
    if accuracy is not None:
        summary += f"; eve guess accuracy {accuracy:.3f}"
    print(summary)
    return 2 if transcript.aborted else 0


def cmd_sweep(args: argparse.Namespace) -> int:
    if args.attack is None:
        raise ValueError("sweep needs --attack with a family spec, e.g. "
                         '\'{"family":"depolarize","qubits":[1],"grid":[0,0.5,1]}\'')
    label, build, grid = parse_attack_family(_load_spec_text(args.attack), args.n)
    rows = sweep(build, grid, args.n, args.seed, label=label, mc_rounds=args.rounds)
    out = Path(args.out)
    if args.format == "csv":
        write_sweep_csv(rows, out)
    else:
        out.write_text(json.dumps([row.to_dict() for row in rows], indent=2) + "\n")
    written = [str(out)]
    if args.plot:
        from .plotting import plot_sweep  # matplotlib import deferred to first use

        plot_sweep(rows, args.plot, title=f"{label} sweep (n={args.n})")
        written.append(args.plot)
    print(f"wrote {len(rows)} rows for attack family '{label}' to {', '.join(written)}")
    return 0


def _verify_product_table(n: int, basis_index: int, expected_product: int) -> tuple[bool, list[str]]:
    state = ghz_basis(n)[basis_index]
    table = measure_all_density(state.density(), Basis.BX)
    support = {tup: p for tup, p in table.items() if p > 1e-12}
    lines = [
        "  " + " ".join(f"{_party_label(k)}={o:+d}" for k, o in enumerate(tup))
        + f"  product={int(np.prod(tup)):+d}  p={p:.6f}"
        for tup, p in sorted(support.items(), reverse=True)
    ]
    ok = (
        len(support) == 2 ** (n - 1)
        and all(int(np.prod(tup)) == expected_product for tup in support)
        and all(abs(p - 2.0 ** (1 - n)) <= 1e-12 for p in support.values())
    )
    return ok, lines


def cmd_verify(args: argparse.Namespace) -> int:
    n = args.n
    checks: list[tuple[str, bool, str]] = []

    ok, lines = _verify_product_table(n, 0, +1)
    print(f"Bx outcome products of the ideal GHZ state (n={n}):")
    print("\n".join(lines))
    checks.append(
        (
            "bx_products_ideal",
            ok,
            f"all {2 ** (n - 1)} outcome tuples have product +1, each p={2.0 ** (1 - n)}",
        )
    )

    ok, lines = _verify_product_table(n, 1, -1)
    print(f"Bx outcome products of the sign-flipped state (basis index 1, n={n}):")
    print("\n".join(lines))
    checks.append(
        (
            "bx_products_flipped",
            ok,
            f"all {2 ** (n - 1)} outcome tuples have product -1, each p={2.0 ** (1 - n)}",
        )
    )

    states = ghz_basis(n)
    stacked = np.array([s.amplitudes for s in states])
    gram_dev = float(np.max(np.abs(stacked.conj() @ stacked.T - np.eye(2**n))))
    complete_dev = float(np.max(np.abs(stacked.T @ stacked.conj() - np.eye(2**n))))
    checks.append(
        (
            "basis_orthonormal_complete",
            gram_dev <= 1e-12 and complete_dev <= 1e-12,
            f"Gram deviation {gram_dev:.2e}, completeness deviation {complete_dev:.2e}",
        )
    )

    uniform_gamma = (2**n - 1) / 2**n
    endpoint_ok = (
        entropy_bound(0.0, n) == 0.0
        and abs(entropy_bound(uniform_gamma, n) - n) <= 1e-12
        and abs(entropy_bound(1.0, n) - np.log2(2**n - 1)) <= 1e-12
    )
    checks.append(
        (
            "entropy_bound_endpoints",
            endpoint_ok,
            f"S(0)=0, S({uniform_gamma})={n} bits, S(1)=log2({2**n - 1})",
        )
    )

    passed = 0
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        passed += ok
    print(f"verify: {passed}/{len(checks)} checks passed")
    return 0 if passed == len(checks) else 1


def _format_basis_state(n: int, index: int) -> str:
    pair, sign_bit = divmod(index, 2)
    rep = ghz_pairs(n)[pair]
    comp = ((1 << n) - 1) ^ rep
    sign = "-" if sign_bit else "+"
    return f"(|{ket_string(rep, n)}> {sign} |{ket_string(comp, n)}>)/sqrt(2)"


def cmd_bases(args: argparse.Namespace) -> int:
    states = ghz_basis(args.n)
    for i, state in enumerate(states):
        print(f"basis[{i}] = {_format_basis_state(args.n, i)}")
    if args.out:
        payload = [state.to_dict() for state in states]
        Path(args.out).write_text(json.dumps(payload, indent=2) + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsdc",
        description="N-partner GHZ-state secure direct communication: simulation and security analysis",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one protocol session and write its transcript")
    p_run.add_argument("--n", type=int, default=3, help="number of parties, 3..16 (default 3)")
    p_run.add_argument("--c", type=float, default=0.25, help="control-round probability (default 0.25)")
    p_run.add_argument("--message", required=True, help="bit string to transmit, e.g. 1011")
    p_run.add_argument("--attack", default=None, help="attack spec: JSON, @file, or variant:key=value")
    p_run.add_argument("--seed", type=int, default=0, help="session seed (default 0)")
    p_run.add_argument("--out", default=None, help="transcript JSON path (omit to skip the file)")
    p_run.add_argument("--format", choices=["json"], default="json", help="transcript format")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep an attack family and write gamma/d/entropy rows")
    p_sweep.add_argument("--n", type=int, default=3, help="number of parties (default 3)")
    p_sweep.add_argument("--attack", required=True, help="attack family spec: JSON, @file, or compact")
    p_sweep.add_argument("--rounds", type=int, default=None, help="control rounds per grid point for Monte Carlo columns")
    p_sweep.add_argument("--seed", type=int, default=0, help="Monte Carlo master seed (default 0)")
    p_sweep.add_argument("--out", required=True, help="output path for the sweep table")
    p_sweep.add_argument("--format", choices=["csv", "json"], default="csv", help="table format (default csv)")
    p_sweep.add_argument("--plot", default=None, help="also render the sweep figure to this image path")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="recompute the outcome-product tables and bound endpoints")
    p_verify.add_argument("--n", type=int, default=3, help="number of parties (default 3)")
    p_verify.set_defaults(func=cmd_verify)

    p_bases = sub.add_parser("bases", help="print the GHZ-type basis in canonical order")
    p_bases.add_argument("--n", type=int, default=3, help="number of qubits (default 3)")
    p_bases.add_argument("--out", default=None, help="optional JSON path for the basis amplitudes")
    p_bases.set_defaults(func=cmd_bases)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse uses exit code 2 for usage errors; 2 is reserved for aborts here
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
