"""Command-line entry point.

Every subcommand writes its data to ``--out`` (stdout by default) and a
run manifest next to it: ``<out>.manifest.json`` for file outputs, or
stderr when writing to stdout. Exit status is 0 on success, 1 for bad
input and 2 when a resource cap is hit.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from . import __version__
from .approx import approx_frame_potential_log2, clt_series, log2_haar
from .arch import CircuitArchitecture, gf2_rank, parse_circuit, validate
from .errors import CommFPError, InputError, InvalidArchitecture, ResourceLimitError
from .exactfp import expressiveness, frame_potential_exact, frame_potential_pauli
from .lattice import lattice_volume_pauli, volume_bounds, walk_lattice
from .montecarlo import importance_sampling_fp, is_all_rotations, multinomial_fp
from .noncomm import all_pairs, bifourier_coefficients, census_2q, classify_representation
from .spectrum import build_spectrum_general, build_spectrum_pauli, difference_distribution
from .survey import census_exhaustive, census_sampled

SAMPLING_METHODS = ("is", "is-absorbing", "multinomial")
COMPARE_METHODS = ("exact", "approx") + SAMPLING_METHODS


class UsageError(InputError):
    pass


@dataclass
class RunManifest:
    subcommand: str
    config: dict
    input_digests: dict[str, str] = field(default_factory=dict)
    seed: int | None = None
    version: str = __version__
    duration_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"


def _sha256(path: str) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# circuit inputs


@dataclass
class Circuit:
    """A parsed input file: a Pauli-Z architecture or general diagonals."""

    n: int
    arch: CircuitArchitecture | None = None
    spectrum: object = None

    @property
    def N(self) -> int:
        return self.arch.N if self.arch is not None else self.spectrum.N

    def get_spectrum(self):
        if self.spectrum is None:
            self.spectrum = build_spectrum_pauli(self.arch)
        return self.spectrum


def _read_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None


def load_input(path: str) -> Circuit:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError("circuit file must hold a JSON object")
    if "diagonals" in data:
        try:
            n = int(data["n"])
            spec = build_spectrum_general(data["diagonals"], data["amplitudes"])
        except KeyError as exc:
            raise InputError(f"missing field {exc}") from None
        if len(data["amplitudes"]) != 1 << n:
            raise InputError(f"expected 2^{n} amplitudes")
        return Circuit(n, spectrum=spec)
    arch = parse_circuit(data)
    validate(arch)
    return Circuit(arch.n, arch=arch)


def _volume(c: Circuit) -> int:
    if c.arch is not None:
        return lattice_volume_pauli(c.arch)[0]
    return walk_lattice(difference_distribution(c.spectrum)).volume


def _det_var(c: Circuit) -> float:
    return 1.0 if c.arch is not None else float(c.get_spectrum().det_covariance())


def _exact_series(c: Circuit, tmax: int):
    if c.arch is not None:
        return frame_potential_pauli(c.arch, tmax)
    return frame_potential_exact(c.spectrum, tmax)


# ---------------------------------------------------------------------------
# rendering


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _log2_fraction(x: Fraction) -> float:
    return math.log2(x.numerator) - math.log2(x.denominator)


# ---------------------------------------------------------------------------
# subcommands; each returns (data text, manifest seed)


def cmd_validate(args):
    c = load_input(args.circuit)
    if c.arch is None:
        s = c.spectrum
        out = {"mode": "general", "n": c.n, "N": s.N, "omega_size": s.size}
    else:
        out = {"mode": "pauli", "rank": gf2_rank(c.arch.A), **c.arch.canonical().to_dict(), "N": c.arch.N}
    return _json(out), None


def cmd_volume(args):
    c = load_input(args.circuit)
    out = {"n": c.n, "N": c.N}
    if c.arch is not None:
        V, v = lattice_volume_pauli(c.arch)
        b = volume_bounds(c.n, c.N)
        out.update(V_U=V, v_U=v, bounds=b.to_dict(), within_bounds=b.holds(V))
    else:
        out["V_U"] = _volume(c)
    return _json(out), None


def cmd_exact(args):
    c = load_input(args.circuit)
    series = _exact_series(c, args.tmax)
    E = expressiveness(series, c.n)
    rows = []
    values, logs = series.values(), series.log2()
    for i, t in enumerate(series.t):
        F, lg = values[i], logs[i]
        if series.exact:
            Fe = F
            rows.append(
                {
                    "t": t,
                    "F": float(Fe),
                    "F_log2": lg,
                    "F_numerator": str(Fe.numerator),
                    "F_denominator_log2": Fe.denominator.bit_length() - 1,
                    "E": float(E[i]),
                    "E_log2": _log2_fraction(E[i]),
                }
            )
        else:
            rows.append({"t": t, "F": F, "F_log2": lg, "E": E[i], "E_log2": math.log2(E[i]),
                         "forward_error": series.forward_error[i]})
    if args.format == "json":
        return _json({"n": c.n, "N": c.N, "exact": series.exact, "rows": rows}), None
    return _csv(["t", "F_exact_num", "F_exact_log2", "E_exact"],
                [(r["t"], r["F"], r["F_log2"], r["E"]) for r in rows]), None


def cmd_approx(args):
    c = load_input(args.circuit)
    V = _volume(c)
    clt = clt_series(V, _det_var(c), c.n, c.N, args.tmax)
    if args.format == "json":
        rows = [{"t": t, "F_tilde_log2": f, "E_tilde_log2": e} for t, f, e in zip(clt.t, clt.F_log2, clt.E_log2)]
        return _json({"n": c.n, "N": c.N, "V_U": V, "det_var_K": clt.det_var_K, "rows": rows}), None
    return _csv(["t", "F_tilde_log2", "E_tilde_log2"], zip(clt.t, clt.F_log2, clt.E_log2)), None


def _sample(c: Circuit, method: str, t: int, M: int, seed: int, threads: int):
    if method == "multinomial":
        if c.arch is None:
            raise InvalidArchitecture("the multinomial estimator needs a Pauli all-rotations circuit")
        return multinomial_fp(c.n, t, M, seed, arch=c.arch, threads=threads)
    diff = difference_distribution(c.get_spectrum())
    mode = "absorbing" if method == "is-absorbing" else "unbiased"
    return importance_sampling_fp(diff, t, M, seed, mode, threads=threads)


def cmd_sample(args):
    c = load_input(args.circuit)
    rep = _sample(c, args.method, args.t, args.samples, args.seed, args.threads)
    return _json(rep.to_dict()), args.seed


def cmd_census(args):
    if args.exhaustive:
        tally = census_exhaustive(args.n, threads=args.threads)
    else:
        if args.samples is None or args.seed is None:
            raise UsageError("census needs --exhaustive or both --samples and --seed")
        tally = census_sampled(args.n, args.samples, args.seed, threads=args.threads)
    return tally.to_json(), args.seed


def cmd_noncomm(args):
    cen = census_2q()
    out = {
        "total": cen.total,
        "noncommuting": cen.noncommuting,
        "probabilistic_noncommuting": cen.probabilistic_noncommuting,
        "non_probabilistic": cen.non_probabilistic,
        "commuting_probabilistic": cen.commuting_probabilistic,
    }
    if args.dump:
        pairs = []
        for p in all_pairs():
            table = bifourier_coefficients(p)
            pairs.append(
                {
                    "H1": p.first,
                    "H2": p.second,
                    "commutes": p.commutes,
                    "class": classify_representation(table),
                    "coefficients": table.to_dict(),
                }
            )
        out["pairs"] = pairs
    return _json(out), None


def cmd_compare(args):
    methods = [m for m in (args.methods or "").replace(",", " ").split() if m]
    if not methods:
        raise UsageError("compare needs at least one method")
    bad = [m for m in methods if m not in COMPARE_METHODS]
    if bad:
        raise UsageError(f"unknown method(s) {bad}; choose from {list(COMPARE_METHODS)}")
    sampled = [m for m in methods if m in SAMPLING_METHODS]
    if sampled and args.seed is None:
        raise UsageError("sampling methods need --seed")
    c = load_input(args.circuit)
    if "multinomial" in methods and (c.arch is None or not is_all_rotations(c.arch)):
        raise InvalidArchitecture("multinomial requires the all-rotations circuit")
    header, columns = ["t"], []
    ts = list(range(1, args.tmax + 1))
    if "exact" in methods:
        series = _exact_series(c, args.tmax)
        header += ["F_exact", "F_exact_log2"]
        columns += [list(map(float, series.values())), series.log2()]
    if "approx" in methods:
        V, det = _volume(c), _det_var(c)
        lg = [approx_frame_potential_log2(V, det, c.N, t) for t in ts]
        header += ["F_tilde", "F_tilde_log2", "E_tilde_log2"]
        columns += [[2.0**x for x in lg], lg, [log2_haar(c.n, t) - x for t, x in zip(ts, lg)]]
    for m in sampled:
        reps = [_sample(c, m, t, args.samples, args.seed, args.threads) for t in ts]
        tag = m.replace("-", "_")
        header += [f"F_{tag}", f"F_{tag}_se", f"F_{tag}_log2"]
        columns += [
            [r.estimate for r in reps],
            [r.std_error for r in reps],
            [r.log2_estimate if r.log2_estimate is not None else -math.inf for r in reps],
        ]
    rows = [[t] + [col[i] for col in columns] for i, t in enumerate(ts)]
    return _csv(header, rows), args.seed


# ---------------------------------------------------------------------------
# argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be a non-negative integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="commfp", description="Frame potential and expressiveness of commutative circuits.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser, required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=fn)
        sp.add_argument("--threads", type=_positive, default=1, help="worker threads (results do not depend on it)")
        sp.add_argument("--out", default="-", help="output file (default: stdout)")
        sp.add_argument("--manifest", default=None, help="manifest path (default: <out>.manifest.json)")
        return sp

    sp = add("validate", cmd_validate, "check a circuit file and echo its canonical form")
    sp.add_argument("--circuit", required=True)
    sp = add("volume", cmd_volume, "lattice volume and its bounds")
    sp.add_argument("--circuit", required=True)
    for name, fn, help_ in (
        ("exact", cmd_exact, "exact frame potential and expressiveness series"),
        ("approx", cmd_approx, "approximate (CLT) series in log2"),
    ):
        sp = add(name, fn, help_)
        sp.add_argument("--circuit", required=True)
        sp.add_argument("--tmax", type=_positive, required=True)
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp = add("sample", cmd_sample, "Monte Carlo estimate of the frame potential at one t")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--method", choices=SAMPLING_METHODS, required=True)
    sp.add_argument("--t", type=_positive, required=True)
    sp.add_argument("--samples", type=_positive, required=True)
    sp.add_argument("--seed", type=_nonneg, required=True)
    sp = add("census", cmd_census, "tally reduced volumes over architectures")
    sp.add_argument("--n", type=_positive, required=True)
    g = sp.add_mutually_exclusive_group(required=True)
    g.add_argument("--exhaustive", action="store_true")
    g.add_argument("--samples", type=_nonneg)
    sp.add_argument("--seed", type=_nonneg)
    sp = add("noncomm-census", cmd_noncomm, "two-qubit non-commutative classification")
    sp.add_argument("--dump", action="store_true", help="include per-pair coefficient tables")
    sp = add("compare", cmd_compare, "exact, approximate and sampled series side by side")
    sp.add_argument("--circuit", required=True)
    sp.add_argument("--tmax", type=_positive, required=True)
    sp.add_argument("--methods", required=True, help=f"comma-separated subset of {','.join(COMPARE_METHODS)}")
    sp.add_argument("--samples", type=_positive, default=10_000)
    sp.add_argument("--seed", type=_nonneg)
    return p


def _config(args) -> dict:
    skip = {"func", "out", "manifest"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def run(argv=None, *, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    start = time.perf_counter()
    try:
        args = build_parser().parse_args(argv)
        text, seed = args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except ResourceLimitError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 2
    except (CommFPError, ValueError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    digests = {}
    for key in ("circuit",):
        path = getattr(args, key, None)
        if path:
            digests[path] = _sha256(path)
    manifest = RunManifest(
        subcommand=args.command,
        config=_config(args),
        input_digests=digests,
        seed=seed,
        duration_s=round(time.perf_counter() - start, 6),
    )
    if args.out == "-":
        stdout.write(text)
        if args.manifest:
            Path(args.manifest).write_text(manifest.to_json())
        else:
            stderr.write(manifest.to_json())
    else:
        Path(args.out).write_text(text)
        Path(args.manifest or f"{args.out}.manifest.json").write_text(manifest.to_json())
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
