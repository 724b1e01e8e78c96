"""Command-line front end.

Every command takes a tree source: a builder spec (``cf-ternary:L``,
``cf-binary:L``, ``xz-binary:L``, ``jw:m``, ``bk:m``) or a tree JSON file.
Exit codes: 0 success, 1 a validation verdict failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import oracle
from .fermion import bk_standard, ladder_operators, majoranas_anticommute, number_operator, occupation_map
from .pauli import OracleSizeError, to_dense
from .spin import (
    QuadraticHamiltonian,
    basis_covariance,
    basis_expectations,
    brickwork_step,
    ladder_hamiltonian_dense,
    mode_unitary,
    occupation_from_covariance,
    path_state_dense,
    propagate_path_state,
    run_spin_circuit,
)
from .tree import (
    GeneratorSetError,
    QubitTree,
    TreeError,
    build_cf_binary,
    build_cf_ternary,
    build_jw_chain,
    build_xz_binary,
    cf_binary_levels,
    generators,
)

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
MAX_GEN_ORACLE = 8
MAX_SIM_ORACLE = 7
MAX_MAP_ALL = 12
DEFAULT_TOL = 1e-8


class InputError(Exception):
    """Bad command-line input; reported with exit code 2."""


@dataclass
class Verdict:
    invariant: str
    ok: bool
    max_deviation: float = 0.0


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    verdicts: list[Verdict] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)

    def check(self, invariant: str, deviation: float, tol: float) -> bool:
        deviation = float(abs(deviation))
        v = Verdict(invariant, deviation <= tol, deviation)
        self.verdicts.append(v)
        return v.ok

    def passed(self) -> bool:
        return all(v.ok for v in self.verdicts)

    def text(self) -> str:
        lines = [f"# command: {self.command}", f"# inputs: {self.inputs_digest}"]
        for v in self.verdicts:
            lines.append(f"# {'PASS' if v.ok else 'FAIL'} {v.invariant} max_deviation={v.max_deviation:.3e}")
        for k, t in self.timings.items():
            lines.append(f"# time {k}: {t:.3f}s")
        return "\n".join(lines)


class _Timer:
    def __init__(self, report: RunReport, name: str):
        self.report, self.name = report, name

    def __enter__(self):
        self.t0 = time.perf_counter()

    def __exit__(self, *exc):
        self.report.timings[self.name] = self.report.timings.get(self.name, 0.0) + time.perf_counter() - self.t0


def fmt(x: float) -> str:
    return f"{x:.12g}"


# tree sources ---------------------------------------------------------------------

_BUILDERS = {
    "cf-ternary": build_cf_ternary,
    "cf-binary": build_cf_binary,
    "xz-binary": build_xz_binary,
    "jw": build_jw_chain,
    "bk": lambda m: bk_standard(m).bk_tree,
}


def load_tree(source: str) -> tuple[QubitTree, str]:
    """Resolve a builder spec or JSON file; returns the tree and the text digested."""
    kind, sep, arg = source.partition(":")
    if sep and kind in _BUILDERS:
        try:
            n = int(arg)
        except ValueError:
            raise InputError(f"builder spec {source!r}: {arg!r} is not an integer") from None
        try:
            return _BUILDERS[kind](n), source
        except ValueError as exc:
            raise InputError(f"builder spec {source!r}: {exc}") from None
    path = Path(source)
    if not path.is_file():
        raise InputError(f"{source!r} is neither a builder spec nor a readable file")
    text = path.read_text()
    try:
        return QubitTree.from_json(text), text
    except TreeError as exc:
        raise InputError(f"{source}: {exc}") from None


def digest(*parts: str) -> str:
    h = hashlib.sha256()
    for p in parts:
        h.update(p.encode())
    return h.hexdigest()[:16]


def parse_bits(text: str, m: int) -> np.ndarray:
    text = text.strip()
    if len(text) != m or any(ch not in "01" for ch in text):
        raise InputError(f"bit vector {text!r} must be {m} characters of 0/1")
    return np.array([int(ch) for ch in text], dtype=np.uint8)


def bits_text(bits) -> str:
    return "".join(str(int(b)) for b in bits)


# output ---------------------------------------------------------------------------

def emit(args, header: list[str], rows: list[list], report: RunReport, text_lines: list[str] | None = None):
    """Write a table in the chosen format; the report goes to stderr unless json."""
    out = open(args.output, "w", newline="") if args.output else sys.stdout
    try:
        if args.format == "json":
            payload = {
                "report": {**asdict(report), "passed": report.passed()},
                "header": header,
                "rows": rows,
            }
            json.dump(payload, out, indent=1)
            out.write("\n")
            return
        if args.format == "csv":
            w = csv.writer(out, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        else:
            for line in text_lines if text_lines is not None else ["\t".join(map(str, r)) for r in rows]:
                out.write(line + "\n")
        print(report.text(), file=sys.stderr)
    finally:
        if out is not sys.stdout:
            out.close()


def _finish(report: RunReport) -> int:
    return EXIT_OK if report.passed() else EXIT_FAIL


# commands -------------------------------------------------------------------------

def cmd_tree(args, report: RunReport) -> int:
    tree, src = load_tree(args.tree)
    report.inputs_digest = digest(src)
    if args.format == "json":
        out = open(args.output, "w") if args.output else sys.stdout
        out.write(tree.to_json() + "\n")
        if out is not sys.stdout:
            out.close()
        return EXIT_OK
    rows = [[p, c, lb] for p, c, lb in tree.edges]
    emit(args, ["parent", "child", "label"], rows, report,
         [f"root {tree.root}, m = {tree.m}"] + [f"{p} -{lb}-> {c}" for p, c, lb in tree.edges])
    return EXIT_OK


def cmd_gen(args, report: RunReport) -> int:
    tree, src = load_tree(args.tree)
    report.inputs_digest = digest(src)
    with _Timer(report, "generate"):
        gs = generators(tree)
    with _Timer(report, "validate"):
        try:
            gs.validate()
            report.check("generator-set law (symbolic)", 0.0, args.tol)
        except GeneratorSetError as exc:
            print(f"validation: {exc}", file=sys.stderr)
            report.check("generator-set law (symbolic)", 1.0, args.tol)
    if args.oracle:
        if tree.m > MAX_GEN_ORACLE:
            raise InputError(f"--oracle is limited to m <= {MAX_GEN_ORACLE}, got {tree.m}")
        with _Timer(report, "oracle"):
            mats = [to_dense(g) for g in gs]
            dim = mats[0].shape[0]
            dev = 0.0
            for j in range(len(mats)):
                for k in range(j, len(mats)):
                    ac = mats[j] @ mats[k] + mats[k] @ mats[j]
                    if j == k:
                        ac = ac + 2 * np.eye(dim)
                    dev = max(dev, np.abs(ac).max())
            report.check("anticommutation (dense)", dev, args.tol)
            prod = np.linalg.multi_dot(mats) if len(mats) > 2 else mats[0] @ mats[-1]
            iota = prod[0, 0]
            report.check("product is a phase times identity (dense)",
                         max(np.abs(prod - iota * np.eye(dim)).max(), abs(abs(iota) - 1)), args.tol)
    rows = [[k + 1, j, lb, str(g)] for k, (g, (j, lb)) in enumerate(zip(gs, gs.origins))]
    emit(args, ["index", "node", "label", "term"], rows, report,
         [f"g{r[0]}\t({r[1]},{r[2]})\t{r[3]}" for r in rows])
    return _finish(report)


def cmd_map(args, report: RunReport) -> int:
    tree, src = load_tree(args.tree)
    omap = occupation_map(tree)
    m = tree.m
    given = args.forward or args.inverse or []
    report.inputs_digest = digest(src, *given)
    if args.table:
        emit(args, ["node", "kind", "c", "s", "D"], omap.csv_rows(), report)
        return EXIT_OK
    if args.all:
        if m > MAX_MAP_ALL:
            raise InputError(f"--all enumerates 2**m vectors and is limited to m <= {MAX_MAP_ALL}")
        with _Timer(report, "enumerate"):
            idx = np.arange(2**m, dtype=np.int64)
            allbits = ((idx[:, None] >> np.arange(m - 1, -1, -1)) & 1).astype(np.uint8)
            enc = omap.forward(allbits)
            back = omap.inverse(enc)
            bad = int(np.any(back != allbits, axis=1).sum())
            distinct = len({bits_text(r) for r in enc})
        report.check("inverse(forward(n)) == n, all vectors", bad, 0)
        report.check("forward map is a bijection", 2**m - distinct, 0)
        rows = [[bits_text(a), bits_text(b)] for a, b in zip(allbits, enc)]
        emit(args, ["n", "n_encoded"], rows, report)
        return _finish(report)
    direction = "inverse" if args.inverse else "forward"
    vecs = np.array([parse_bits(b, m) for b in given])
    out = omap.inverse(vecs) if args.inverse else omap.forward(vecs)
    check = omap.forward(out) if args.inverse else omap.inverse(out)
    report.check("round trip", int(np.any(check != vecs)), 0)
    rows = [[bits_text(a), bits_text(b)] for a, b in zip(vecs, out)]
    head = ["n_encoded", "n"] if direction == "inverse" else ["n", "n_encoded"]
    emit(args, head, rows, report, [r[1] for r in rows])
    return _finish(report)


def cmd_ladder(args, report: RunReport) -> int:
    tree, src = load_tree(args.tree)
    report.inputs_digest = digest(src)
    try:
        ladders = ladder_operators(tree)
    except TreeError as exc:
        raise InputError(str(exc)) from None
    report.check("CAR (symbolic)", 0.0 if majoranas_anticommute(ladders) else 1.0, args.tol)
    if args.oracle:
        if tree.m > MAX_GEN_ORACLE:
            raise InputError(f"--oracle is limited to m <= {MAX_GEN_ORACLE}, got {tree.m}")
        with _Timer(report, "oracle"):
            report.check("CAR (dense)", oracle.car_deviation(ladders), args.tol)
            vac = oracle.vacuum(tree.m)
            report.check("vacuum annihilation", max(np.abs(a.to_dense() @ vac).max() for a in ladders), args.tol)
            dev = max(np.abs(number_operator(tree, a.mode).to_dense()
                             - a.to_dense(dagger=True) @ a.to_dense()).max() for a in ladders)
            report.check("number operator equals a^+ a", dev, args.tol)
    rows = []
    for a in ladders:
        rows.append([a.mode, a.format(args.dagger), str(a.e_prime), str(a.e_dprime)])
    emit(args, ["mode", "operator", "e_prime", "e_dprime"], rows, report, [r[1] for r in rows])
    return _finish(report)


# circuits -------------------------------------------------------------------------

def _load_circuit(path: str) -> tuple[dict, str]:
    p = Path(path)
    if not p.is_file():
        raise InputError(f"circuit file {path!r} not found")
    text = p.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}: {exc.msg}") from None
    if not isinstance(data, dict):
        raise InputError(f"{path}: circuit must be a JSON object")
    for key in ("tree", "basis", "steps"):
        if key not in data:
            raise InputError(f"{path}: missing field {key!r}")
    if data["basis"] not in ("spin", "ladder"):
        raise InputError(f"{path}: field 'basis' must be 'spin' or 'ladder'")
    if not isinstance(data["steps"], list):
        raise InputError(f"{path}: field 'steps' must be a list")
    return data, text


def _tree_of_circuit(data: dict, path: str) -> QubitTree:
    src = data["tree"]
    if isinstance(src, dict):
        try:
            return QubitTree.from_dict(src)
        except TreeError as exc:
            raise InputError(f"{path}: field 'tree': {exc}") from None
    cand = Path(path).parent / src
    return load_tree(str(cand) if cand.is_file() else src)[0]


def _step_triples(step, k: int, n: int, complex_ok: bool):
    if not isinstance(step, dict) or "coeffs" not in step:
        raise InputError(f"steps[{k}]: expected an object with 'coeffs'")
    out = []
    for e, c in enumerate(step["coeffs"]):
        if not (isinstance(c, list) and len(c) in (3, 4)):
            raise InputError(f"steps[{k}].coeffs[{e}]: expected [j, k, value] or [j, k, re, im]")
        j, kk = c[0], c[1]
        if not (isinstance(j, int) and isinstance(kk, int) and 1 <= j <= n and 1 <= kk <= n):
            raise InputError(f"steps[{k}].coeffs[{e}]: indices must be integers in 1..{n}")
        val = complex(c[2], c[3]) if len(c) == 4 else c[2]
        if not complex_ok and isinstance(val, complex):
            raise InputError(f"steps[{k}].coeffs[{e}]: spin coefficients are real")
        out.append((j - 1, kk - 1, val))
    return out, float(step.get("tau", 1.0))


def _occupation_pairs(tree, gs):
    """``(mode, (index of e', index of e''))`` for trees with a ladder pairing."""
    try:
        ladders = ladder_operators(tree)
    except TreeError:
        return []
    lookup = {(g.x, g.z): k for k, g in enumerate(gs)}
    return [(a.mode, (lookup[a.e_prime.x, a.e_prime.z], lookup[a.e_dprime.x, a.e_dprime.z])) for a in ladders]


def simulate_spin(data, path, tree, args, report):
    gs = generators(tree)
    gens = list(gs)
    n = len(gens)
    bits = parse_bits(data.get("initial", "0" * tree.m), tree.m)
    steps = []
    with _Timer(report, "build"):
        for k, step in enumerate(data["steps"]):
            terms, tau = _step_triples(step, k, n, complex_ok=False)
            try:
                steps.append(QuadraticHamiltonian.from_terms(gens, terms, tau))
            except ValueError as exc:
                raise InputError(f"steps[{k}]: {exc}") from None
    pairs = _occupation_pairs(tree, gs) if args.occupations else []
    want_occ = bool(pairs)
    with _Timer(report, "propagate"):
        v0 = basis_expectations(gens, bits)
        m0 = basis_covariance(gens, bits) if (want_occ or args.oracle) else None
        run = run_spin_circuit(gens, steps, v0, m0)
    header = ["step", "tau"] + [f"v{k + 1}" for k in range(n)]
    occ_cols = [j for j, _ in pairs]
    header += [f"nbar{j}" for j in occ_cols]
    if args.oracle:
        header += ["dev_v", "dev_M"] + (["dev_nbar"] if want_occ else [])
        psi = oracle.basis_state(bits)
    rows = []
    worst_v = worst_m = worst_n = 0.0
    for s, ham in enumerate(steps):
        v = run.vectors[s]
        row = [s + 1, fmt(ham.tau)] + [fmt(x) for x in v]
        nbar = []
        if want_occ:
            cov = run.covariances[s]
            nbar = [occupation_from_covariance(cov, a, b) for _, (a, b) in pairs]
            row += [fmt(x) for x in nbar]
        if args.oracle:
            with _Timer(report, "oracle"):
                psi = ham.unitary_dense() @ psi
                dv = np.abs(v - oracle.generator_expectations(psi, gens)).max()
                dm = np.abs(run.covariances[s] - oracle.generator_covariance(psi, gens)).max()
                row += [fmt(dv), fmt(dm)]
                worst_v, worst_m = max(worst_v, dv), max(worst_m, dm)
                if want_occ:
                    dn = max(abs(nb - oracle.expectation(psi, number_operator(tree, j).to_dense()).real)
                             for j, nb in zip(occ_cols, nbar))
                    row.append(fmt(dn))
                    worst_n = max(worst_n, dn)
        rows.append(row)
    if args.oracle:
        report.check("expectations match dense evolution", worst_v, args.tol)
        report.check("covariances match dense evolution", worst_m, args.tol)
        if want_occ:
            report.check("occupations match dense probabilities", worst_n, args.tol)
    return header, rows


def _chi_from(data, m):
    raw = data.get("chi")
    if raw is None:
        chi = np.zeros(m, dtype=complex)
        chi[0] = 1.0
        return chi
    if not isinstance(raw, list) or len(raw) != m:
        raise InputError(f"field 'chi' must list {m} amplitudes")
    chi = np.array([complex(*x) if isinstance(x, list) else complex(x) for x in raw])
    nrm = np.linalg.norm(chi)
    if nrm == 0:
        raise InputError("field 'chi' is the zero vector")
    return chi / nrm


def simulate_ladder(data, path, tree, args, report):
    try:
        ladders = ladder_operators(tree)
    except TreeError as exc:
        raise InputError(f"{path}: {exc}") from None
    m = tree.m
    chi = _chi_from(data, m)
    header = ["step", "tau"] + [f"{p}{k + 1}" for k in range(m) for p in ("re", "im")]
    if args.oracle:
        header += ["dev_state", "dev_number_commutator"]
        psi = path_state_dense(ladders, chi)
        ntot = oracle.total_number(ladders)
    rows = []
    worst_s = worst_c = 0.0
    for k, step in enumerate(data["steps"]):
        terms, tau = _step_triples(step, k, m, complex_ok=True)
        hm = np.zeros((m, m), dtype=complex)
        for j, kk, val in terms:
            hm[j, kk] += val
            if j != kk:
                hm[kk, j] += np.conj(val)
        try:
            with _Timer(report, "propagate"):
                u = mode_unitary(hm, tau)
                chi = propagate_path_state(u, chi)
        except ValueError as exc:
            raise InputError(f"steps[{k}]: {exc}") from None
        row = [k + 1, fmt(tau)] + [fmt(x) for c in chi for x in (c.real, c.imag)]
        if args.oracle:
            with _Timer(report, "oracle"):
                w = oracle.exp_hamiltonian(ladder_hamiltonian_dense(ladders, hm), tau)
                psi = w @ psi
                ds = np.abs(psi - path_state_dense(ladders, chi)).max()
                dc = np.abs(w @ ntot - ntot @ w).max()
                row += [fmt(ds), fmt(dc)]
                worst_s, worst_c = max(worst_s, ds), max(worst_c, dc)
        rows.append(row)
    if args.oracle:
        report.check("path-state amplitudes match dense evolution", worst_s, args.tol)
        report.check("evolution commutes with total number operator", worst_c, args.tol)
    return header, rows


def cmd_simulate(args, report: RunReport) -> int:
    data, text = _load_circuit(args.circuit)
    report.inputs_digest = digest(text)
    tree = _tree_of_circuit(data, args.circuit)
    if args.oracle and tree.m > MAX_SIM_ORACLE:
        raise InputError(f"--oracle is limited to m <= {MAX_SIM_ORACLE}, got m = {tree.m}")
    sim = simulate_spin if data["basis"] == "spin" else simulate_ladder
    header, rows = sim(data, args.circuit, tree, args, report)
    emit(args, header, rows, report, None if args.format != "text" else _text_table(header, rows))
    return _finish(report)


def _text_table(header, rows):
    return [",".join(header)] + [",".join(map(str, r)) for r in rows]


def cmd_random_circuit(args, report: RunReport) -> int:
    tree, src = load_tree(args.tree)
    report.inputs_digest = digest(src, str(args.seed))
    rng = np.random.default_rng(args.seed)
    steps = []
    if args.basis == "spin":
        levels = cf_binary_levels(tree)
        if args.brickwork:
            if levels is None:
                raise InputError("--brickwork needs a cf-binary tree")
            gens = list(generators(tree))
            for s in range(args.steps):
                ham = brickwork_step(gens, levels, s, rng, args.tau)
                steps.append({"coeffs": [[a + 1, b + 1, v] for a, b, v in ham.nonzero_pairs()], "tau": args.tau})
        else:
            n = 2 * tree.m + 1
            for _ in range(args.steps):
                coeffs = [[a + 1, b + 1, float(rng.normal())] for a in range(n) for b in range(a + 1, n)]
                steps.append({"coeffs": coeffs, "tau": args.tau})
    else:
        m = tree.m
        for _ in range(args.steps):
            coeffs = []
            for a in range(m):
                coeffs.append([a + 1, a + 1, float(rng.normal())])
                for b in range(a + 1, m):
                    coeffs.append([a + 1, b + 1, float(rng.normal()), float(rng.normal())])
            steps.append({"coeffs": coeffs, "tau": args.tau})
    circuit = {"tree": args.tree if ":" in args.tree else tree.to_dict(), "basis": args.basis, "steps": steps}
    out = open(args.output, "w") if args.output else sys.stdout
    json.dump(circuit, out)
    out.write("\n")
    if out is not sys.stdout:
        out.close()
    return EXIT_OK


# entry point ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--oracle", action="store_true", help="cross-check against dense matrices")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL, help="deviation tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0, help="seed for any sampling")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text")
    common.add_argument("--output", "-o", help="write the table here instead of stdout")

    p = argparse.ArgumentParser(prog="qubittree", description="Qubit-tree generators, fermion maps and circuit simulation.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("tree", parents=[common], help="print a tree (json format round-trips)")
    s.add_argument("tree")
    s.set_defaults(func=cmd_tree)

    s = sub.add_parser("gen", parents=[common], help="list and validate the 2m+1 generators")
    s.add_argument("tree")
    s.set_defaults(func=cmd_gen)

    s = sub.add_parser("map", parents=[common], help="occupation-number XOR maps")
    s.add_argument("tree")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--forward", nargs="+", metavar="BITS", help="qubit bits to encoded bits")
    g.add_argument("--inverse", nargs="+", metavar="BITS", help="encoded bits to qubit bits")
    g.add_argument("--all", action="store_true", help="enumerate all vectors and verify the round trip")
    g.add_argument("--table", action="store_true", help="print the index sets c(j), s(j), D(j)")
    s.set_defaults(func=cmd_map)

    s = sub.add_parser("ladder", parents=[common], help="ladder operators of an x-y or x-z tree")
    s.add_argument("tree")
    s.add_argument("--dagger", action="store_true", help="print creation operators")
    s.set_defaults(func=cmd_ladder)

    s = sub.add_parser("simulate", parents=[common], help="run a quadratic circuit file")
    s.add_argument("circuit")
    s.add_argument("--occupations", action="store_true", help="add <n_j> columns (x-y and x-z trees)")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("random-circuit", parents=[common], help="write a random circuit file")
    s.add_argument("tree")
    s.add_argument("--basis", choices=("spin", "ladder"), default="spin")
    s.add_argument("--steps", type=int, default=3)
    s.add_argument("--tau", type=float, default=0.3)
    s.add_argument("--brickwork", action="store_true", help="local triples only (spin basis, cf-binary)")
    s.set_defaults(func=cmd_random_circuit)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    args = parser.parse_args(argv)
    report = RunReport("qubittree " + " ".join(argv), "")
    t0 = time.perf_counter()
    try:
        code = args.func(args, report)
    except (InputError, OracleSizeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report.timings["total"] = time.perf_counter() - t0
    return code


if __name__ == "__main__":
    sys.exit(main())
