"""Command-line front end.

Subcommands ``validate``, ``haar``, ``run``, ``spectrum`` and ``classical``
all take scenario files (see :mod:`qmet.scenario`).  Exit codes: 0 success,
2 validation failure, 3 convergence-verdict failure, 4 I/O or parse error.
"""

from __future__ import annotations

import argparse
import csv
import io as _stdio
import json
import os
import sys
import tempfile
from pathlib import Path

import numpy as np

from . import classical
from .algebra import state_spanning_family
from .classical import bridge_to_quantum, to_gns_coordinates
from .dynamics import gns, invariance_check, transfer_operator
from .ergodic import (
    cyclic_vector_check,
    decomposition_check,
    ergodic_average_experiment,
    ergodicity_test,
    mean_projection,
    spectral_report,
)
from .errors import InconsistentVerdict, ParseError, ValidationError
from .linalg import op_norm
from .quantum_group import coassociativity_check, haar_state, homomorphism_defects
from .scenario import (
    Scenario,
    load_scenario,
    resolve_action,
    resolve_finite_group,
    resolve_group,
    resolve_group_state,
    resolve_net,
    resolve_state,
    scenario_from_dict,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_VERDICT = 3
EXIT_IO = 4


class VerdictFailure(Exception):
    """The run finished but did not converge or the verdicts disagree."""

    def __init__(self, report, message):
        super().__init__(message)
        self.report = report


def _pairs(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=complex)]


def _pipeline(sc: Scenario):
    qg, act, point_action = resolve_action(sc)
    omega = resolve_state(sc, act)
    thetas = state_spanning_family(qg.algebra)
    return qg, act, point_action, omega, thetas


def cmd_validate(sc: Scenario) -> dict:
    """Structural defects of the scenario's quantum group, action and state."""
    qg, act, _, omega, thetas = _pipeline(sc)
    delta = homomorphism_defects(qg.algebra, qg.tensor, qg.delta)
    defects = {
        "coassociativity": coassociativity_check(qg),
        "delta_multiplicative": delta["multiplicative"],
        "delta_adjoint": delta["adjoint"],
        "delta_unital": delta["unital"],
        "alpha_multiplicative": act.defects["multiplicative"],
        "alpha_adjoint": act.defects["adjoint"],
        "alpha_unital": act.defects["unital"],
        "coaction": act.defects["coaction"],
        "invariance": invariance_check(omega, act, thetas),
    }
    return {
        "scenario": sc.name,
        "defects": defects,
        "tolerance": sc.structure_tol,
        "valid": all(v <= sc.structure_tol for v in defects.values()),
    }


def cmd_haar(sc: Scenario) -> dict:
    qg = resolve_group(sc.group, sc) if sc.group is not None else resolve_action(sc)[0]
    h = haar_state(qg)
    return {"scenario": sc.name, "block_dims": list(qg.algebra.block_dims), "haar": _pairs(h.values)}


def cmd_run(sc: Scenario) -> dict:
    """gns → fixed space → projection → averages → verdicts → cyclic vector."""
    qg, act, point_action, omega, thetas = _pipeline(sc)
    inv = invariance_check(omega, act, thetas)
    if inv > sc.structure_tol:
        raise ValidationError(f"ω is not invariant (defect {inv:.3g})")
    g = gns(act.source, omega)
    p = mean_projection(act, g, thetas)
    net = resolve_net(sc, qg)
    report = ergodic_average_experiment(net, act, g, thetas, tol=sc.converged_tol, projection=p)
    decomposition = decomposition_check(act, g, thetas)
    h = qg.haar if qg.haar is not None else haar_state(qg)
    haar_gap = float(np.abs(transfer_operator(h, act, g).matrix - p).max())
    out = {
        "scenario": sc.name,
        "seed": sc.seed,
        "group": sc.group if isinstance(sc.group, str) else "inline",
        "action": sc.action,
        "dim_A": act.source.dim,
        "dim_H": g.dim,
        "dim_V": report.dim_V,
        "dim_N": decomposition["dim_N"],
        "gns_near_cutoff": g.near_cutoff,
        "invariance_defect": inv,
        "cyclic_vector_defect": cyclic_vector_check(act, g, thetas),
        "orthogonality_defect": decomposition["orthogonality_defect"],
        "haar_projection_gap": haar_gap,
        "net": report.net,
        "deviations": report.rows,
        "final_dev": report.final_dev,
        "annihilation": report.annihilation,
    }
    if point_action is not None:
        table, _ = resolve_finite_group(sc.group.partition(":")[2], sc)
        bridge = bridge_to_quantum(table, point_action, omega.values.real)
        cp = classical.fixed_projection(bridge.classical_system())
        out["classical_projection_defect"] = float(np.abs(to_gns_coordinates(cp, g) - p).max())
    verdict = {"converged": report.converged, "tolerance": sc.converged_tol}
    try:
        v = ergodicity_test(act, g, net, thetas=thetas, tol=sc.converged_tol, report=report)
        verdict.update(
            ergodic=v.ergodic,
            dim_V=v.dim_V,
            final_correlation_defect=v.final_correlation_defect,
            consistent=True,
        )
    except InconsistentVerdict as exc:
        verdict.update(consistent=False, message=str(exc))
    out["verdict"] = verdict
    if not (verdict["converged"] and verdict["consistent"]):
        raise VerdictFailure(out, "ergodic experiment did not converge or verdicts disagree")
    return out


def cmd_spectrum(sc: Scenario, state_spec) -> dict:
    qg, act, _, omega, thetas = _pipeline(sc)
    g = gns(act.source, omega)
    mu = resolve_group_state(state_spec, qg)
    k = transfer_operator(mu, act, g).matrix
    p = mean_projection(act, g, thetas)
    return {"scenario": sc.name, "state": state_spec, "dim_H": g.dim, **spectral_report(k, p)}


def _unitary_spec(spec) -> np.ndarray:
    if isinstance(spec, list):
        return np.array([[complex(*z) if isinstance(z, list) else complex(z) for z in row] for row in spec])
    kind, _, arg = str(spec).partition(":")
    if kind == "shift":
        return classical.cyclic_shift(int(arg))
    if kind == "phase":
        return np.array([[complex(arg)]])
    raise ParseError(f"bad unitary spec {spec!r}")


def cmd_classical(sc: Scenario) -> dict:
    cfg = sc.classical
    if not isinstance(cfg, dict):
        raise ParseError("scenario has no 'classical' section")
    kind = cfg.get("kind", "integers")
    if kind == "integers":
        sys_ = classical.integer_system(_unitary_spec(cfg["unitary"]), require_unitary=cfg.get("unitary_only", True))
        p = classical.fixed_projection(sys_)
        n_max = int(cfg.get("n_max", 50))
        rows = [
            {
                "n": n,
                "deviation": op_norm(classical.folner_average(sys_, n) - p),
                "folner_defect": classical.folner_defect(sys_, n),
            }
            for n in range(1, n_max + 1)
        ]
        return {"scenario": sc.name, "kind": kind, "rank_P": int(round(np.trace(p).real)), "rows": rows}
    if kind == "finite":
        table, _ = resolve_finite_group(cfg["group"], sc)
        bridge = bridge_to_quantum(table, cfg["action"], cfg.get("measure"))
        sys_ = bridge.classical_system()
        p_cl = classical.fixed_projection(sys_)
        g = gns(bridge.action.source, bridge.omega)
        family = state_spanning_family(bridge.qg.algebra) + [bridge.qg.haar]
        koopman_gap = max(
            float(np.abs(transfer_operator(t, bridge.action, g).matrix
                         - to_gns_coordinates(bridge.koopman_average(t), g)).max())
            for t in family
        )
        p_q = mean_projection(bridge.action, g, family[:-1])
        return {
            "scenario": sc.name,
            "kind": kind,
            "order": int(table.shape[0]),
            "full_group_average_defect": float(np.abs(classical.folner_average(sys_, 1) - p_cl).max()),
            "koopman_gap": koopman_gap,
            "projection_gap": float(np.abs(to_gns_coordinates(p_cl, g) - p_q).max()),
        }
    raise ParseError(f"unknown classical kind {kind!r}")


# output

def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def csv_table(rows) -> str:
    buf = _stdio.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["n", "dev", "amenability_defect", "correlation_defect"])
    for r in rows:
        writer.writerow([r["n"], repr(r["dev"]), repr(r["amenability_defect"]), repr(r["correlation_defect"])])
    return buf.getvalue()


def write_atomic(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(report: dict, sc: Scenario, out: str | None, many: bool):
    json_path = None
    if out is not None:
        json_path = Path(out) / f"{sc.name}.json" if many else Path(out)
    elif sc.output_json:
        json_path = sc.path(sc.output_json)
    text = dumps_report(report)
    if json_path is None:
        sys.stdout.write(text)
    else:
        write_atomic(json_path, text)
    if "deviations" in report:
        csv_path = None
        if sc.output_csv:
            csv_path = sc.path(sc.output_csv)
        elif json_path is not None:
            csv_path = json_path.with_suffix(".csv")
        if csv_path is not None:
            write_atomic(csv_path, csv_table(report["deviations"]))


def _load(target: str) -> Scenario:
    path = Path(target)
    if path.exists():
        return load_scenario(path)
    if target.lstrip().startswith("{"):
        try:
            return scenario_from_dict(json.loads(target))
        except json.JSONDecodeError as exc:
            raise ParseError(f"inline scenario: {exc.msg}") from exc
    raise ParseError(f"{target}: no such scenario file")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, help="convergence tolerance (overrides the scenario)")
    common.add_argument("--seed", type=int, help="seed recorded in the report")
    common.add_argument("--out", help="output JSON path (a directory when several scenarios are given)")

    parser = argparse.ArgumentParser(prog="qmet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_ in [
        ("validate", "check quantum group, action and invariance"),
        ("haar", "solve for the Haar state"),
        ("run", "run the ergodic averaging experiment"),
        ("classical", "run the classical Følner-average oracle"),
    ]:
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("scenarios", nargs="+", help="scenario JSON files")
    p = sub.add_parser("spectrum", parents=[common], help="spectral report of a transfer operator")
    p.add_argument("scenarios", nargs="+")
    p.add_argument("--state", default="haar", help="haar, counit, family:<i>, lazy:<i> or a JSON value list")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    many = len(args.scenarios) > 1
    status = EXIT_OK
    for target in args.scenarios:
        try:
            sc = _load(target)
            if args.tol is not None:
                if args.tol <= 0:
                    raise ParseError("--tol must be positive")
                sc.converged_tol = args.tol
            if args.seed is not None:
                sc.seed = args.seed
            if args.command == "validate":
                report = cmd_validate(sc)
                code = EXIT_OK if report["valid"] else EXIT_VALIDATION
            elif args.command == "haar":
                report, code = cmd_haar(sc), EXIT_OK
            elif args.command == "run":
                try:
                    report, code = cmd_run(sc), EXIT_OK
                except VerdictFailure as exc:
                    report, code = exc.report, EXIT_VERDICT
            elif args.command == "spectrum":
                state = args.state
                if state.lstrip().startswith("["):
                    state = json.loads(state)
                report, code = cmd_spectrum(sc, state), EXIT_OK
            else:
                report, code = cmd_classical(sc), EXIT_OK
            _emit(report, sc, args.out, many)
        except ParseError as exc:
            print(f"{target}: parse error: {exc}", file=sys.stderr)
            code = EXIT_IO
        except OSError as exc:
            print(f"{target}: I/O error: {exc}", file=sys.stderr)
            code = EXIT_IO
        except ValidationError as exc:
            print(f"{target}: {type(exc).__name__}: {exc}", file=sys.stderr)
            code = EXIT_VALIDATION
        status = max(status, code)
    return status


if __name__ == "__main__":
    sys.exit(main())
