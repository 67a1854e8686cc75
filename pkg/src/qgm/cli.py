"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 capacity exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classical, quantum
from .errors import QGMError, ValidationError
from .graph import SeparatorTriple, SiteGraph, validate_triple
from .plot import render_plot

PRESETS = ("five_spin", "five-spin")
CSV_HEADER = ("beta", "cmi_nats")


def parse_sites(text: str | None) -> frozenset:
    if text is None:
        return frozenset()
    text = text.strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.split(","))
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of site indices, got {text!r}") from None


def load_model(source: str, h1: float = 2.0, h2: float = 2.0, h3: float = 2.0) -> quantum.LocalHamiltonian:
    """Preset name (``five_spin``) or path to a Hamiltonian JSON file."""
    if source in PRESETS:
        return quantum.five_spin_preset(h1, h2, h3)
    return quantum.LocalHamiltonian.from_dict(_read_json(source))


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc


@dataclass(frozen=True)
class SweepConfig:
    model: quantum.LocalHamiltonian
    triple: SeparatorTriple
    beta_min: float = 0.0
    beta_max: float = 5.0
    steps: int = 51
    out: str | None = None

    def __post_init__(self):
        if not self.beta_min <= self.beta_max:
            raise ValidationError(f"beta_min {self.beta_min} exceeds beta_max {self.beta_max}")
        if self.beta_min < 0:
            raise ValidationError("beta must be nonnegative")
        if self.steps < 1:
            raise ValidationError(f"steps must be >= 1, got {self.steps}")
        validate_triple(self.model.graph, self.triple, require_separation=False)

    @property
    def betas(self) -> np.ndarray:
        return np.linspace(self.beta_min, self.beta_max, self.steps)


def run_cmi_sweep(cfg: SweepConfig) -> list[tuple[float, float]]:
    """``(beta, I(A:C|B))`` on the uniform β grid, endpoints included."""
    H = quantum.build_hamiltonian(cfg.model)
    rows = []
    for beta in cfg.betas:
        rho = quantum.gibbs_state(H, float(beta), cfg.model.dims).rho
        rows.append((float(beta), quantum.quantum_cmi(rho, cfg.triple)))
    return rows


def format_csv(rows: Sequence[tuple[float, float]]) -> str:
    lines = [",".join(CSV_HEADER)]
    lines += [f"{beta:.17g},{cmi:.17g}" for beta, cmi in rows]
    return "\n".join(lines) + "\n"


def parse_csv(text: str) -> list[tuple[float, float]]:
    reader = csv.reader(io.StringIO(text))
    rows = []
    try:
        header = next(reader)
    except StopIteration:
        raise ValidationError("empty CSV input") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ValidationError(f"expected CSV header {','.join(CSV_HEADER)}")
    for rec in reader:
        if not rec:
            continue
        try:
            rows.append((float(rec[0]), float(rec[1])))
        except (ValueError, IndexError):
            raise ValidationError(f"bad CSV row {rec}") from None
    return rows


def run_check(model: quantum.LocalHamiltonian, beta: float, max_A: int = 2, tol: float = quantum.CMI_TOL,
              commute_tol: float = quantum.COMMUTE_TOL) -> dict:
    """Commutation audit plus Markov verdict; ``consistent`` is ``all_commute ⇒ markov``."""
    comm = quantum.commutation_audit(model, commute_tol)
    markov = quantum.is_quantum_markov_network(model, beta, max_A, tol)
    return {
        "beta": beta,
        "commutation": comm.to_dict(),
        "markov": markov.to_dict(),
        "consistent": (not comm.all_commute) or markov.is_markov,
    }


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _model_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", default="five_spin", help="preset name (five_spin) or Hamiltonian JSON path")
    p.add_argument("--h1", type=float, default=2.0)
    p.add_argument("--h2", type=float, default=2.0)
    p.add_argument("--h3", type=float, default=2.0)


def _triple_from_args(args, model: quantum.LocalHamiltonian) -> SeparatorTriple:
    if args.A is None and args.C is None and args.B is None:
        if args.model in PRESETS:
            return quantum.FIVE_SPIN_TRIPLE
        raise ValidationError("--A, --B and --C are required for model files")
    return SeparatorTriple(parse_sites(args.A), parse_sites(args.B), parse_sites(args.C))


def _cmd_cmi_sweep(args) -> None:
    model = load_model(args.model, args.h1, args.h2, args.h3)
    cfg = SweepConfig(model, _triple_from_args(args, model), args.beta_min, args.beta_max, args.steps, args.out)
    _emit(format_csv(run_cmi_sweep(cfg)), cfg.out)


def _cmd_check(args) -> None:
    model = load_model(args.model, args.h1, args.h2, args.h3)
    report = run_check(model, args.beta, args.max_a, args.tol, args.commute_tol)
    _emit(json.dumps(report, indent=2) + "\n", args.out)


def _cmd_plot(args) -> None:
    if args.csv == "-":
        text = sys.stdin.read()
    else:
        try:
            text = Path(args.csv).read_text()
        except OSError as exc:
            raise ValidationError(f"cannot read {args.csv}: {exc.strerror}") from exc
    _emit(render_plot(parse_csv(text)), args.out)


def _cmd_hc_check(args) -> None:
    data = _read_json(args.file)
    try:
        g = SiteGraph.from_dict(data["graph"])
    except KeyError:
        raise ValidationError("hc-check input needs a 'graph' entry") from None
    if "potentials" in data:
        try:
            pots = [classical.CliquePotential(tuple(p["support"]), p["table"]) for p in data["potentials"]]
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed potential: {exc}") from exc
        table = classical.hc_factorize(g, pots)
    elif "probs" in data:
        table = classical.JointTable(g, np.asarray(data["probs"], dtype=float))
    else:
        raise ValidationError("hc-check input needs 'potentials' or 'probs'")
    report = classical.is_markov_network(g, table, args.max_a, args.tol).to_dict()
    if table.normalizer is not None:
        report["Z"] = table.normalizer
    _emit(json.dumps(report, indent=2) + "\n", args.out)


def _cmd_bp(args) -> None:
    model = classical.PairwiseModel.from_dict(_read_json(args.file))
    res = classical.sum_product_bp(model, args.max_iters, args.damping)
    report = {
        "converged": res.converged,
        "iterations": res.iterations,
        "marginals": [m.tolist() for m in res.marginals],
    }
    _emit(json.dumps(report, indent=2) + "\n", args.out)


def _cmd_transfer_z(args) -> None:
    data = _read_json(args.file)
    try:
        z = classical.transfer_matrix_Z(data["terms"], data["arities"])
    except KeyError as exc:
        raise ValidationError(f"transfer-z input needs {exc}") from None
    _emit(f"{z:.17g}\n", args.out)


def _cmd_denoise(args) -> None:
    try:
        text = Path(args.file).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {args.file}: {exc.strerror}") from exc
    restored = classical.denoise_demo(classical.parse_grid(text), args.coupling, args.evidence)
    _emit(classical.format_grid(restored), args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qgm", description="Classical and quantum Markov network tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cmi-sweep", help="I(A:C|B) of the Gibbs state over a beta grid, as CSV")
    _model_args(p)
    p.add_argument("--A")
    p.add_argument("--B")
    p.add_argument("--C")
    p.add_argument("--beta-min", type=float, default=0.0)
    p.add_argument("--beta-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=51)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cmi_sweep)

    p = sub.add_parser("check", help="commutation audit and quantum Markov verdict, as JSON")
    _model_args(p)
    p.add_argument("--beta", type=float, default=2.0)
    p.add_argument("--max-a", type=int, default=2)
    p.add_argument("--tol", type=float, default=quantum.CMI_TOL)
    p.add_argument("--commute-tol", type=float, default=quantum.COMMUTE_TOL)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("plot", help="render a cmi-sweep CSV as SVG")
    p.add_argument("csv", help="CSV file, or - for stdin")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_plot)

    p = sub.add_parser("hc-check", help="classical Markov check of a factorized or tabulated distribution")
    p.add_argument("file")
    p.add_argument("--max-a", type=int, default=2)
    p.add_argument("--tol", type=float, default=classical.CMI_TOL)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_hc_check)

    p = sub.add_parser("bp", help="sum-product marginals of a pairwise model")
    p.add_argument("file")
    p.add_argument("--max-iters", type=int, default=200)
    p.add_argument("--damping", type=float, default=None)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_bp)

    p = sub.add_parser("transfer-z", help="chain partition function by sequential summation")
    p.add_argument("file")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_transfer_z)

    p = sub.add_parser("denoise", help="restore a small binary image given as 0/1 text")
    p.add_argument("file")
    p.add_argument("--coupling", type=float, default=1.0)
    p.add_argument("--evidence", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_denoise)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args)
    except QGMError as exc:
        print(f"qgm: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
