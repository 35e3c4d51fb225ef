"""Command-line interface: state-file I/O, one subcommand per capability.

State files are UTF-8 JSON with keys ``dims`` (``[d_a, d_b]`` for bipartite
states, ``[d]`` for single systems) and ``matrix`` (row-major array of
``[re, im]`` pairs; nested rows are also accepted on input). Reports are
deterministic given flags and seed; ``--json`` emits a canonical report
whose numeric fields reproduce bit-for-bit across runs, so wall time is
shown only in the human-readable output.

Exit codes: 0 success (or certified classical), 1 NotClassical witness,
2 input or validation error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import DiscordiumError, ParseError
from .counterexample import run_counterexample
from .discord import (
    DiscordConfig,
    NotClassical,
    ZERO_DISCORD_TOL,
    certify_classical,
    discord,
)
from .measures import mutual_information, von_neumann_entropy
from .petz import reconstruct_cq, recovery_residual
from .channels import dephase
from .states import (
    BipartiteState,
    bipartite,
    random_cq_state,
    random_state,
    validate_density,
)

# Tolerance used when parsing user-supplied state files.
_STATE_TOL = 1e-8

_ENTROPY_REFERENCE = 1.7555
_ZEROED_REFERENCE = 1.7546
_REFERENCE_TOL = 5e-4


def _default_seed() -> int:
    try:
        return int(os.environ.get("DISCORDIUM_SEED", "0"))
    except ValueError:
        return 0


def _matrix_payload(m: np.ndarray, dims: list[int]) -> dict:
    flat = []
    for row in np.asarray(m, dtype=complex):
        for z in row:
            flat.append([float(z.real), float(z.imag)])
    return {"dims": list(dims), "matrix": flat}


def _parse_matrix(payload, path: str) -> tuple[np.ndarray, list[int]]:
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: top level must be a JSON object")
    for key in ("dims", "matrix"):
        if key not in payload:
            raise ParseError(f"{path}: missing key {key!r}")
    dims = payload["dims"]
    if (
        not isinstance(dims, list)
        or not dims
        or len(dims) > 2
        or not all(isinstance(d, int) and d >= 1 for d in dims)
    ):
        raise ParseError(f"{path}: 'dims' must be [d] or [d_a, d_b] of positive ints")
    dim = int(np.prod(dims))
    raw = payload["matrix"]
    if not isinstance(raw, list):
        raise ParseError(f"{path}: 'matrix' must be an array")
    if len(raw) == dim and raw and isinstance(raw[0], list) and len(raw[0]) == dim:
        raw = [pair for row in raw for pair in row]
    if len(raw) != dim * dim:
        raise ParseError(
            f"{path}: 'matrix' has {len(raw)} entries, expected {dim * dim}"
        )
    entries = []
    for k, pair in enumerate(raw):
        if not (isinstance(pair, list) and len(pair) == 2):
            raise ParseError(f"{path}: matrix entry {k} is not a [re, im] pair")
        try:
            z = complex(float(pair[0]), float(pair[1]))
        except (TypeError, ValueError) as exc:
            raise ParseError(f"{path}: matrix entry {k} is not numeric") from exc
        if not (np.isfinite(z.real) and np.isfinite(z.imag)):
            raise ParseError(f"{path}: matrix entry {k} is not finite")
        entries.append(z)
    return np.array(entries, dtype=complex).reshape(dim, dim), [int(d) for d in dims]


def read_matrix_file(path: str) -> tuple[np.ndarray, list[int]]:
    """Parse a state/operator file; raw matrix, no density validation."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    return _parse_matrix(payload, path)


def read_state_file(path: str, raw: bool = False):
    """Parse and (unless ``raw``) validate a state file.

    Returns ``(matrix, dims)``; validation errors propagate with the
    offending invariant named.
    """
    mat, dims = read_matrix_file(path)
    if not raw:
        mat = validate_density(mat, tol=_STATE_TOL).mat
    return mat, dims


def write_state_file(path: str, m: np.ndarray, dims: list[int]) -> None:
    payload = _matrix_payload(m, dims)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)
        fh.write("\n")


def _digest(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _bipartite_from_file(path: str) -> BipartiteState:
    mat, dims = read_state_file(path)
    if len(dims) != 2:
        raise ParseError(f"{path}: 'dims' must have two factors for this command")
    return bipartite(mat, dims[0], dims[1], tol=_STATE_TOL)


def _report(command: str, inputs: dict, seed, tolerances: dict, results: dict) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "tolerances": tolerances,
        "results": results,
    }


def _emit(report: dict, as_json: bool, wall_time: float, stream=None) -> None:
    stream = stream or sys.stdout
    if as_json:
        print(json.dumps(report, sort_keys=True), file=stream)
        return
    print(f"command: {report['command']}", file=stream)
    for name, info in report["inputs"].items():
        print(f"input {name}: {info['path']} (sha256 {info['sha256'][:12]}...)", file=stream)
    if report["seed"] is not None:
        print(f"seed: {report['seed']}", file=stream)
    for key, value in report["tolerances"].items():
        print(f"tolerance {key}: {value}", file=stream)
    for key, value in report["results"].items():
        if isinstance(value, dict) and "matrix" in value:
            print(f"{key}: <matrix dims={value['dims']}>", file=stream)
        else:
            print(f"{key}: {value}", file=stream)
    print(f"wall time: {wall_time:.3f} s", file=stream)


def _cmd_entropy(args) -> int:
    mat, dims = read_state_file(args.state)
    rho = validate_density(mat, tol=_STATE_TOL)
    results = {
        "entropy_bits": von_neumann_entropy(rho),
        "spectrum": [float(v) for v in rho.spectrum],
        "support_rank": rho.support_rank,
    }
    report = _report(
        "entropy",
        {"state": {"path": args.state, "sha256": _digest(args.state)}},
        None,
        {"validation_tol": _STATE_TOL},
        results,
    )
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0


def _cmd_discord(args) -> int:
    s = _bipartite_from_file(args.state)
    cfg = DiscordConfig(
        restarts=args.restarts,
        step_tol=args.tol if args.tol is not None else DiscordConfig.step_tol,
        enlarge=args.enlarge,
        seed=args.seed,
    )
    result = discord(s, cfg)
    results = {
        "value_bits": result.value,
        "converged": result.converged,
        "restarts_used": result.restarts_used,
        "enlarged": result.enlarged,
        "best_basis": _matrix_payload(result.best_basis, [result.best_basis.shape[0]]),
    }
    report = _report(
        "discord",
        {"state": {"path": args.state, "sha256": _digest(args.state)}},
        args.seed,
        {"step_tol": cfg.step_tol},
        results,
    )
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0


def _cmd_certify(args) -> int:
    s = _bipartite_from_file(args.state)
    cfg = DiscordConfig(restarts=args.restarts, seed=args.seed)
    tol = args.tol if args.tol is not None else ZERO_DISCORD_TOL
    outcome = certify_classical(s, tol=tol, cfg=cfg)
    inputs = {"state": {"path": args.state, "sha256": _digest(args.state)}}
    tolerances = {"discord_zero_tol": tol}
    if isinstance(outcome, NotClassical):
        results = {
            "classical": False,
            "witness_value_bits": outcome.value,
            "witness_basis": _matrix_payload(outcome.basis, [outcome.basis.shape[0]]),
        }
        report = _report("certify", inputs, args.seed, tolerances, results)
        _emit(report, args.json, time.perf_counter() - args._t0)
        return 1
    results = {
        "classical": True,
        "partition": [list(part) for part in outcome.partition],
        "residual": outcome.residual,
        "basis": _matrix_payload(outcome.basis, [outcome.basis.shape[0]]),
    }
    report = _report("certify", inputs, args.seed, tolerances, results)
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0


def _cmd_petz_verify(args) -> int:
    s = _bipartite_from_file(args.state)
    basis, basis_dims = read_state_file(args.basis, raw=True)
    reconstruction = reconstruct_cq(s, basis)
    dephased = bipartite(dephase(s, basis), s.d_a, s.d_b, tol=1e-8)
    results = {
        "residual_trace_distance": recovery_residual(s, basis),
        "reconstruction_frobenius_error": float(
            np.linalg.norm(s.mat - reconstruction)
        ),
        "mutual_information_gap_bits": mutual_information(s)
        - mutual_information(dephased),
    }
    report = _report(
        "petz-verify",
        {
            "state": {"path": args.state, "sha256": _digest(args.state)},
            "basis": {"path": args.basis, "sha256": _digest(args.basis)},
        },
        None,
        {"validation_tol": _STATE_TOL},
        results,
    )
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0


def _cmd_counterexample(args) -> int:
    first, second = run_counterexample()
    checks = {
        "original_entropy_matches_reference": bool(
            abs(first.original_entropy - _ENTROPY_REFERENCE) <= _REFERENCE_TOL
        ),
        "zeroed_entropy_matches_reference": bool(
            abs(first.modified_entropy - _ZEROED_REFERENCE) <= _REFERENCE_TOL
        ),
        "both_deltas_negative": bool(
            first.entropy_delta < 0 and second.entropy_delta < 0
        ),
    }
    results = {
        "zeroing_outer_pair": first.to_dict(),
        "zeroing_inner_pair": second.to_dict(),
        "checks": checks,
    }
    report = _report(
        "counterexample",
        {},
        None,
        {"reference_tol": _REFERENCE_TOL},
        results,
    )
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0 if all(checks.values()) else 2


def _cmd_random(args) -> int:
    if args.kind == "cq":
        if args.db is None:
            raise ParseError("--kind cq requires --db")
        state = random_cq_state(args.da, args.db, seed=args.seed)
        mat, dims = state.mat, [args.da, args.db]
    else:
        if args.db is not None:
            dims = [args.da, args.db]
        else:
            dims = [args.da]
        dim = int(np.prod(dims))
        rank = args.rank if args.rank is not None else dim
        mat = random_state(dim, rank, seed=args.seed).mat
    write_state_file(args.output, mat, dims)
    results = {
        "written": args.output,
        "dims": dims,
        "sha256": _digest(args.output),
    }
    report = _report(
        "random",
        {},
        args.seed,
        {},
        results,
    )
    _emit(report, args.json, time.perf_counter() - args._t0)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discordium",
        description="Classical-quantum discord and classicality certification "
        "for bipartite density matrices.",
    )
    parser.add_argument("--version", action="version", version=f"discordium {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_common(p, seeded=True):
        p.add_argument("--json", action="store_true", help="emit a canonical JSON report")
        if seeded:
            p.add_argument(
                "--seed", type=int, default=_default_seed(),
                help="PRNG seed (default: DISCORDIUM_SEED env var or 0)",
            )

    p = sub.add_parser("entropy", help="von Neumann entropy of a state file")
    p.add_argument("state")
    add_common(p, seeded=False)
    p.set_defaults(func=_cmd_entropy)

    p = sub.add_parser("discord", help="minimize the dephasing information gap")
    p.add_argument("state")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--enlarge", action="store_true",
                   help="embed A into dimension d_A^2 (rank-one POVM scan)")
    p.add_argument("--tol", type=float, default=None, help="optimizer step tolerance")
    add_common(p)
    p.set_defaults(func=_cmd_discord)

    p = sub.add_parser("certify", help="certify classicality or exit 1 with a witness")
    p.add_argument("state")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--tol", type=float, default=None, help="discord-zero threshold in bits")
    add_common(p)
    p.set_defaults(func=_cmd_certify)

    p = sub.add_parser("petz-verify", help="block-reconstruction residual at a basis")
    p.add_argument("state")
    p.add_argument("--basis", required=True, help="JSON file with a d_a x d_a unitary")
    add_common(p, seeded=False)
    p.set_defaults(func=_cmd_petz_verify)

    p = sub.add_parser("counterexample",
                       help="entropy decrease under conjugate-pair zeroing")
    add_common(p, seeded=False)
    p.set_defaults(func=_cmd_counterexample)

    p = sub.add_parser("random", help="write a random state fixture file")
    p.add_argument("--kind", choices=["haar", "cq"], required=True)
    p.add_argument("--da", type=int, required=True)
    p.add_argument("--db", type=int, default=None)
    p.add_argument("--rank", type=int, default=None)
    p.add_argument("-o", "--output", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_random)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args._t0 = time.perf_counter()
    try:
        return args.func(args)
    except DiscordiumError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
