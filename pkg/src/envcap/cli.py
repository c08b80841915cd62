"""Command-line interface: ``envcap <subcommand> [options]``.

Exit status: 0 on success, 2 on invalid input, 3 on numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys

import numpy as np

from . import capacity as cap
from .channels import load_blocks, load_unitary, resolve_gate, shor_augment
from .errors import NumericalError
from .experiments import EXPERIMENTS
from .twoqubit import conferencing_code_two_qubit, kraus_cirac_angles

EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL = 0, 2, 3


class CliError(ValueError):
    pass


def _default_seed() -> int:
    raw = os.environ.get("ENVCAP_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise CliError(f"ENVCAP_SEED must be an integer, got {raw!r}")


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` -> ``np.linspace(start, stop, count)``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise CliError("--grid must look like start:stop:count")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise CliError(f"cannot parse grid {text!r}")
    if count < 1:
        raise CliError("grid must contain at least one point")
    return np.linspace(start, stop, count)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gate", help="registry name: identity, swap, cnot, dcnot, qutrit-vc, "
                                       "weyl-vc:<d>, uc2:<u>, controlled:<file>, file:<path>")
    common.add_argument("--file", help="JSON matrix file (or block list for 'controlled')")
    common.add_argument("--restarts", type=int, default=32)
    common.add_argument("--seed", type=int, default=None, help="default: $ENVCAP_SEED or 0")
    common.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    common.add_argument("--out", help="write the result here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p = argparse.ArgumentParser(prog="envcap", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("chi", parents=[common], help="Holevo information with a product helper")
    s.add_argument("--sender", choices=("A", "H"), default="A")
    sub.add_parser("minent", parents=[common], help="minimum output entropy over product inputs")
    s = sub.add_parser("controlled", parents=[common], help="capacity of a controlled unitary")
    s.add_argument("--entangled", action="store_true", help="helper may entangle E with a receiver ancilla")
    s = sub.add_parser("conf", parents=[common], help="conferencing capacity with product encoders")
    s.add_argument("--two-qubit-exact", action="store_true", help="emit the explicit two-qubit product code")
    sub.add_parser("decompose", parents=[common], help="canonical angles of a two-qubit unitary")
    s = sub.add_parser("augment", parents=[common], help="augment with a Weyl register, then evaluate")
    s.add_argument("--evaluand", choices=("conf", "chi", "minent"), default="conf")
    s = sub.add_parser("bounds", parents=[common], help="closed-form bounds (or a curve with --curve)")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--epsilon", type=float, default=None, help="also report the continuity bound here")
    s.add_argument("--curve", choices=cap.CURVES)
    s.add_argument("--grid")
    s = sub.add_parser("sweep", parents=[common], help="evaluate a named curve on a grid (two-column CSV)")
    s.add_argument("--curve", choices=cap.CURVES, required=True)
    s.add_argument("--grid", required=True)
    s.add_argument("--d", type=int, default=3)
    s = sub.add_parser("experiment", parents=[common], help="run a scripted reproduction")
    s.add_argument("name", choices=sorted(EXPERIMENTS))
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--samples", type=int, default=None)
    s = sub.add_parser("capacity-n", parents=[common], help="block-length-n capacity lower bound")
    s.add_argument("--n", type=int, choices=(1, 2), default=1)
    s.add_argument("--helper", choices=("separable", "entangled"), default="separable")
    return p


def _unitary(args):
    if args.gate:
        return resolve_gate(args.gate)
    if args.file:
        return load_unitary(args.file)
    raise CliError("give --gate or --file")


def _cfg(args) -> cap.OptimizerConfig:
    if args.threads < 1:
        raise CliError("--threads must be >= 1")
    return cap.OptimizerConfig(restarts=args.restarts, seed=args.seed, threads=args.threads)


def _estimate_result(name: str, est: cap.CapacityEstimate, **extra) -> dict:
    out = {"quantity": name, **est.to_json(), **extra}
    return out


def _rows_result(header, rows) -> dict:
    return {"header": list(header), "rows": [list(r) for r in rows], "bound": "exact"}


# -- subcommand handlers ---------------------------------------------------------------

def cmd_chi(args):
    w = _unitary(args)
    est = cap.chi_role_swapped(w, args.sender, _cfg(args))
    return _estimate_result(f"chi_sender_{args.sender}", est)


def cmd_minent(args):
    return _estimate_result("min_output_entropy", cap.min_output_entropy(_unitary(args), _cfg(args)))


def cmd_controlled(args):
    if args.file:
        blocks = load_blocks(args.file)
    elif args.gate and args.gate.startswith("controlled:"):
        blocks = load_blocks(args.gate.split(":", 1)[1])
    else:
        raise CliError("controlled needs --file with a JSON list of blocks")
    est = cap.controlled_capacity(blocks, args.entangled, _cfg(args))
    return _estimate_result("controlled_capacity_entangled" if args.entangled else "controlled_capacity", est)


def cmd_conf(args):
    w = _unitary(args)
    if args.two_qubit_exact:
        code = conferencing_code_two_qubit(w)
        if not code.valid():
            raise NumericalError("two-qubit code failed its product/orthogonality checks")
        return {"quantity": "conf_product_capacity", "bits": 1.0, "bound": "exact",
                "code": code.to_json()}
    return _estimate_result("conf_product_capacity", cap.conf_product_capacity(w, _cfg(args)))


def cmd_decompose(args):
    p = kraus_cirac_angles(_unitary(args))
    return {"quantity": "kraus_cirac_angles", "bound": "exact", **p.to_json()}


def cmd_augment(args):
    w = shor_augment(_unitary(args))
    fn = {"conf": cap.conf_product_capacity, "chi": cap.chi_H_tensor, "minent": cap.min_output_entropy}
    est = fn[args.evaluand](w, _cfg(args))
    return _estimate_result(f"augmented_{args.evaluand}", est, dims=list(w.dims))


def _curve_result(name, grid, d):
    return _rows_result(("x", name), cap.curve(name, grid, d))


def cmd_bounds(args):
    if args.curve:
        if not args.grid:
            raise CliError("--curve needs --grid")
        return _curve_result(args.curve, parse_grid(args.grid), args.d)
    d = args.d
    rows = [
        ("uncertainty_bound", cap.uncertainty_bound(d), "exact"),
        ("epsilon0", cap.epsilon0(d), "exact"),
        ("uncertainty_f_at_epsilon0", cap.uncertainty_f(cap.epsilon0(d), d), "exact"),
        ("conf_lower_bound", cap.conf_lower_bound(d, d), "exact"),
    ]
    if args.epsilon is not None:
        rows.append(("continuity_bound", cap.continuity_bound(args.epsilon, d), "exact"))
    return {"d": d, "values": [{"quantity": q, "bits": v, "bound": b} for q, v, b in rows]}


def cmd_sweep(args):
    return _curve_result(args.curve, parse_grid(args.grid), args.d)


def cmd_experiment(args):
    name = args.name
    kw = {}
    if name in ("superadditivity-qutrit",):
        kw = dict(restarts=args.restarts, seed=args.seed, threads=args.threads)
    elif name == "superadditivity-weyl":
        kw = dict(d=args.d)
    elif name == "conjugate-pair":
        kw = dict(d=args.d, seed=args.seed, restarts=args.restarts, threads=args.threads)
    elif name == "haar-min-entropy":
        kw = dict(d=args.d, samples=args.samples or 100, seed=args.seed, restarts=args.restarts,
                  threads=args.threads)
    elif name == "ancilla-equality":
        kw = dict(samples=args.samples or 50, seed=args.seed, restarts=args.restarts, threads=args.threads)
    rep = EXPERIMENTS[name](**kw)
    return {"report": rep.to_json(), "_text": rep.to_text()}


def cmd_capacity_n(args):
    est = cap.finite_n_capacity(_unitary(args), args.n, args.helper, _cfg(args))
    return _estimate_result(f"capacity_n{args.n}_{args.helper}", est)


HANDLERS = {
    "chi": cmd_chi, "minent": cmd_minent, "controlled": cmd_controlled, "conf": cmd_conf,
    "decompose": cmd_decompose, "augment": cmd_augment, "bounds": cmd_bounds, "sweep": cmd_sweep,
    "experiment": cmd_experiment, "capacity-n": cmd_capacity_n,
}


# -- rendering -------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def render(result: dict, fmt: str) -> str:
    text = result.pop("_text", None)
    if fmt == "json":
        return json.dumps(result, indent=2, sort_keys=True) + "\n"
    if "header" in result:
        if fmt == "csv":
            buf = io.StringIO()
            wr = csv.writer(buf, lineterminator="\n")
            # two columns; the bound tag rides in the value column's header
            x_name, y_name = result["header"]
            wr.writerow([x_name, f"{y_name} [{result['bound']}]"])
            for x, y in result["rows"]:
                wr.writerow([_fmt(x), _fmt(y)])
            return buf.getvalue()
        return "".join(f"{_fmt(x)} {_fmt(y)} exact\n" for x, y in result["rows"])
    if "report" in result:
        if fmt == "csv":
            rows = [("measurement", "value", "bound", "asserted", "passed")]
            rows += [(m["name"], _fmt(m["value"]), m["bound"], m["asserted"], m["passed"])
                     for m in result["report"]["measurements"]]
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(rows)
            return buf.getvalue()
        return text + "\n"
    values = result["values"] if "values" in result else [result]
    if fmt == "csv":
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["quantity", "value", "bound"])
        for v in values:
            val = v["bits"] if "bits" in v else None
            if val is None:
                for key in ("alpha_x", "alpha_y", "alpha_z"):
                    wr.writerow([key, _fmt(v[key]), v["bound"]])
            else:
                wr.writerow([v["quantity"], _fmt(val), v["bound"]])
        return buf.getvalue()
    lines = []
    for v in values:
        if "bits" in v:
            lines.append(f"{v['quantity']} = {_fmt(v['bits'])} [{v['bound']}]")
        else:
            lines += [f"{k} = {_fmt(v[k])} [{v['bound']}]" for k in ("alpha_x", "alpha_y", "alpha_z")]
    return "\n".join(lines) + "\n"


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.restarts < 1:
            raise CliError("--restarts must be >= 1")
        result = HANDLERS[args.command](args)
        out = render(result, args.format)
    except NumericalError as exc:
        print(f"envcap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, OSError) as exc:
        print(f"envcap: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"envcap: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def main(argv=None) -> None:
    try:
        code = run(argv)
    except SystemExit as exc:  # argparse rejects bad flags with status 2
        code = exc.code if isinstance(exc.code, int) else EXIT_INVALID
    sys.exit(code)


if __name__ == "__main__":
    main()
