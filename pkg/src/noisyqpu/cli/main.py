"""``noisyqpu`` command line: device, bench, run, fit, metrics, sweep."""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from noisyqpu.bench import (
    JssInstance, LrSchedule, PuboPolynomial, energy_spectrum, ghz_tiled_circuit, hahn_echo_circuit,
    idle_t1_circuit, jss_dense_pubo, jss_onehot_pubo, lr_qaoa_circuit,
)
from noisyqpu.cli.config import ExperimentConfig, RunRecord, load_config
from noisyqpu.cli.sweep import KINDS, SweepSpec, rows_to_csv, run_sweep, scale_factor
from noisyqpu.densim.counts import CountsHistogram, distribution_to_dict
from noisyqpu.errors import NumericalError, ValidationError
from noisyqpu.metrics import (
    classical_fidelity, fit_zeta, fit_zeta_delta, hellinger, jensen_shannon, kullback_leibler,
    total_variation,
)
from noisyqpu.noise.model import NoiseToggles
from noisyqpu.noise.snapshot import DeviceSnapshot, median_snapshot, scale_fidelity, synthetic_snapshot
from noisyqpu.pipeline import BACKENDS, DEFAULT_SHOTS, run_circuit
from noisyqpu.qcore.circuit import Circuit, Topology

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 2, 3


# -- file helpers -------------------------------------------------------------
def _read_json(path: str | Path) -> Any:
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"{p}: file not found")
    try:
        return json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{p}: invalid JSON ({exc})") from None


def _write_json(path: Path, obj: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=1, sort_keys=True, allow_nan=False) + "\n")


def _emit(obj: Any, out: str | None) -> None:
    if out:
        _write_json(Path(out), obj)
    else:
        print(json.dumps(obj, indent=1, sort_keys=True))


def _load_snapshot(path: str) -> DeviceSnapshot:
    return DeviceSnapshot.from_dict(_read_json(path))


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected a comma-separated list of numbers, got {text!r}") from None


# -- device -------------------------------------------------------------------
def cmd_device(args) -> None:
    if args.action == "generate":
        snap = synthetic_snapshot(
            args.qubits, args.topology, t1=args.t1, t2=args.t2, fidelity_1q=args.f1q,
            fidelity_2q=args.f2q, readout=args.readout, init_e1=args.init_error,
            spread=args.spread, seed=args.seed,
        )
        _emit(snap.to_dict(), args.out)
        return
    if not args.snapshot:
        raise ValidationError(f"device {args.action} needs a snapshot file")
    snap = _load_snapshot(args.snapshot)
    if args.action == "inspect":
        _emit(_inspect(snap), args.out)
    elif args.action == "scale":
        _emit(scale_fidelity(snap, scale_factor(args.half_decades),
                             scale_decoherence=args.scale_decoherence).to_dict(), args.out)
    else:
        _emit(median_snapshot(snap).to_dict(), args.out)


def _inspect(snap: DeviceSnapshot) -> dict[str, Any]:
    def summary(values):
        a = np.asarray(values, dtype=float)
        return {"min": float(a.min()), "median": float(np.median(a)), "max": float(a.max())}

    report: dict[str, Any] = {
        "num_qubits": snap.num_qubits,
        "basis": list(snap.basis),
        "edges": len(snap.topology.pairs()),
        "t1_s": summary([q.t1 for q in snap.qubits]),
        "t2_s": summary([q.t2 for q in snap.qubits]),
        "readout_error": summary([(q.readout_e0 + q.readout_e1) / 2 for q in snap.qubits]),
    }
    for name in sorted({g.name for g in snap.gates}):
        report[f"{name}_error"] = summary([1 - g.fidelity for g in snap.gates if g.name == name])
    return report


# -- bench --------------------------------------------------------------------
def _instance(args) -> JssInstance:
    if args.durations:
        durs = _floats(args.durations)
        if args.jobs is not None and args.jobs != len(durs):
            raise ValidationError(f"--jobs {args.jobs} but {len(durs)} durations given")
        return JssInstance(tuple(durs), args.machines)
    if args.jobs is None:
        raise ValidationError("give --jobs or --durations")
    return JssInstance.random(args.jobs, args.machines, seed=args.seed)


def _energy(instance: JssInstance, encoding: str, penalty: float | None) -> PuboPolynomial:
    if encoding == "dense":
        return jss_dense_pubo(instance)
    return jss_onehot_pubo(instance, penalty)


def cmd_bench(args) -> None:
    out = Path(args.out)
    if args.kind == "idle-t1":
        circuit = idle_t1_circuit(args.t)
    elif args.kind == "hahn-echo":
        circuit = hahn_echo_circuit(args.t)
    elif args.kind == "ghz":
        triplets = []
        for chunk in args.triplets.split(";"):
            try:
                triplets.append(tuple(int(v) for v in chunk.split(",")))
            except ValueError:
                raise ValidationError(f"bad triplet {chunk!r}") from None
        size = args.qubits or max(max(t) for t in triplets) + 1
        circuit = ghz_tiled_circuit(Topology.line(size) if args.topology == "line" else
                                    getattr(Topology, args.topology)(size), triplets)
    else:
        instance = _instance(args)
        energy = _energy(instance, args.encoding, args.penalty)
        circuit = lr_qaoa_circuit(energy, LrSchedule(args.depth, args.delta_beta, args.delta_gamma))
        spec = energy_spectrum(energy)
        _write_json(out / "instance.json", instance.to_dict())
        _write_json(out / "pubo.json", energy.to_dict())
        _write_json(out / "problem.json", {
            "encoding": args.encoding, "n": energy.n, "ground_energy": spec.ground_energy,
            "ground_degeneracy": spec.ground_degeneracy, "ground_state": spec.ground_state,
        })
    _write_json(out / "circuit.json", circuit.to_dict())
    print(json.dumps({"out": str(out), **circuit.stats()}, sort_keys=True))


# -- run ----------------------------------------------------------------------
def _toggles(args) -> NoiseToggles:
    return NoiseToggles(init=not args.no_init, decoherence=not args.no_decoherence,
                        depolarizing=not args.no_depolarizing, readout=not args.no_readout)


def _run_fit(energy: PuboPolynomial, counts, model: str):
    fitter = {"zeta": fit_zeta, "zeta-delta": fit_zeta_delta}[model]
    return fitter(energy, counts)


def cmd_run(args) -> None:
    config = ExperimentConfig(
        circuit=args.circuit, snapshot=args.snapshot, synthetic_qubits=args.synthetic,
        topology=args.topology, backend=args.backend, shots=args.shots, seed=args.seed,
        ideal=args.ideal, toggles=_toggles(args), tphi_convention=args.tphi_convention,
        pubo=args.pubo, fit_model=args.fit_model,
    )
    circuit = Circuit.from_dict(_read_json(config.circuit))
    if config.snapshot:
        snap = _load_snapshot(config.snapshot)
    else:
        snap = synthetic_snapshot(config.synthetic_qubits or circuit.num_qubits, config.topology)
    start = time.perf_counter()
    result = run_circuit(circuit, snap, backend=config.backend, shots=config.shots, seed=config.seed,
                         toggles=config.toggles, ideal=config.ideal, tphi_convention=config.tphi_convention)
    fit = None
    if config.pubo:
        energy = PuboPolynomial.from_dict(_read_json(config.pubo))
        data = result.counts if result.distribution is None else config.shots * result.distribution
        fit = _run_fit(energy, data, config.fit_model).to_dict()
    elapsed = time.perf_counter() - start

    out = Path(args.out)
    dist = None if result.distribution is None else distribution_to_dict(result.distribution)
    record = RunRecord(config.digest(), result.stats, result.counts.to_dict(), dist, fit, elapsed)
    _write_json(out / "config.json", config.to_dict())
    _write_json(out / "circuit.json", result.compiled.circuit.to_dict())
    _write_json(out / "counts.json", result.counts.to_dict())
    if dist is not None:
        _write_json(out / "distribution.json", dist)
    if fit is not None:
        _write_json(out / "fit.json", fit)
    _write_json(out / "record.json", record.to_dict())
    print(json.dumps({"out": str(out), **result.stats}, sort_keys=True))


def verify_record(run_dir: str | Path) -> bool:
    """True when the stats stored in record.json match the stored circuit."""
    d = Path(run_dir)
    record = _read_json(d / "record.json")
    return Circuit.from_dict(_read_json(d / "circuit.json")).stats() == record["stats"]


# -- fit / metrics --------------------------------------------------------------
def _load_counts(path: str):
    data = _read_json(path)
    if "counts" in data:
        return CountsHistogram.from_dict(data)
    if "probabilities" in data:
        return {k: float(v) for k, v in data["probabilities"].items()}
    raise ValidationError(f"{path}: expected a counts or distribution file")


def cmd_fit(args) -> None:
    energy = PuboPolynomial.from_dict(_read_json(args.pubo))
    counts = _load_counts(args.counts)
    if isinstance(counts, dict):
        counts = CountsHistogram(energy.n, {k: v * args.shots for k, v in counts.items()})
    _emit(_run_fit(energy, counts, args.model).to_dict(), args.out)


METRICS = {
    "hellinger": hellinger,
    "fidelity": classical_fidelity,
    "total_variation": total_variation,
    "jensen_shannon": jensen_shannon,
    "kullback_leibler": kullback_leibler,
}


def cmd_metrics(args) -> None:
    p, q = _load_counts(args.p), _load_counts(args.q)
    names = list(METRICS) if args.metric == "all" else [args.metric]
    report: dict[str, Any] = {}
    for name in names:
        value = METRICS[name](p, q)
        report[name] = value if np.isfinite(value) else None
        if not np.isfinite(value):
            report[f"{name}_infinite"] = True
    _emit(report, args.out)


# -- sweep ----------------------------------------------------------------------
def cmd_sweep(args) -> None:
    if args.pubo:
        energy = PuboPolynomial.from_dict(_read_json(args.pubo))
    else:
        energy = _energy(_instance(args), args.encoding, args.penalty)
    snap = _load_snapshot(args.snapshot) if args.snapshot else synthetic_snapshot(energy.n, args.topology)
    spec = SweepSpec(args.kind, tuple(_floats(args.points)), energy, snap, depth=args.depth,
                     half_decades=args.half_decades, delta_beta=args.delta_beta,
                     delta_gamma=args.delta_gamma, fit_model=args.fit_model, shots=args.shots)
    rows = run_sweep(spec, workers=args.workers)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "sweep.csv").write_text(rows_to_csv(rows))
    failed = sum(1 for r in rows if r.get("error"))
    print(json.dumps({"out": str(out / "sweep.csv"), "rows": len(rows), "failed": failed}))


# -- parser ---------------------------------------------------------------------
def _add_instance_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--jobs", type=int)
    p.add_argument("--machines", type=int, default=2)
    p.add_argument("--durations", help="comma-separated job durations")
    p.add_argument("--encoding", choices=("dense", "onehot"), default="dense")
    p.add_argument("--penalty", type=float, help="one-hot penalty (default 2 (sum t)^2 / machines)")
    p.add_argument("--seed", type=int, default=0, help="seed for random durations")
    p.add_argument("--delta-beta", type=float, default=0.5)
    p.add_argument("--delta-gamma", type=float, default=0.5)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisyqpu", description=__doc__)
    parser.add_argument("--config", help="key = value file supplying defaults; flags win")
    sub = parser.add_subparsers(dest="command", required=True)

    d = sub.add_parser("device", help="generate, inspect, scale or median a device snapshot")
    d.add_argument("action", choices=("generate", "inspect", "scale", "median"))
    d.add_argument("snapshot", nargs="?")
    d.add_argument("-o", "--out")
    d.add_argument("--qubits", type=int, default=5)
    d.add_argument("--topology", choices=("line", "ring", "full"), default="line")
    d.add_argument("--t1", type=float, default=1e-5)
    d.add_argument("--t2", type=float, default=1e-5)
    d.add_argument("--f1q", type=float, default=0.9996)
    d.add_argument("--f2q", type=float, default=0.97)
    d.add_argument("--readout", type=float, default=0.01)
    d.add_argument("--init-error", type=float, default=0.0)
    d.add_argument("--spread", type=float, default=0.0)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--half-decades", type=float, default=0.0, help="scale errors by 10^(-k/2)")
    d.add_argument("--scale-decoherence", action="store_true")
    d.set_defaults(func=cmd_device)

    b = sub.add_parser("bench", help="write a benchmark circuit")
    b.add_argument("kind", choices=("idle-t1", "hahn-echo", "ghz", "qaoa-jss"))
    b.add_argument("-o", "--out", default="bench")
    b.add_argument("--t", type=float, default=0.0, help="delay in seconds")
    b.add_argument("--triplets", default="0,1,2", help="e.g. '0,1,2;3,4,5'")
    b.add_argument("--qubits", type=int, help="device size for ghz")
    b.add_argument("--topology", choices=("line", "ring", "full"), default="line")
    b.add_argument("--depth", type=int, default=1)
    _add_instance_args(b)
    b.set_defaults(func=cmd_bench)

    r = sub.add_parser("run", help="simulate a circuit on a device snapshot")
    r.add_argument("--circuit", required=True)
    r.add_argument("--snapshot")
    r.add_argument("--synthetic", type=int, help="synthetic device size (default: circuit size)")
    r.add_argument("--topology", choices=("line", "ring", "full"), default="line")
    r.add_argument("--backend", choices=BACKENDS, default="density")
    r.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--ideal", action="store_true", help="skip the noise pass")
    for flag in ("init", "decoherence", "depolarizing", "readout"):
        r.add_argument(f"--no-{flag}", action="store_true")
    r.add_argument("--tphi-convention", choices=("phenomenological", "literal"), default="phenomenological")
    r.add_argument("--pubo", help="energy polynomial to fit the outcome with")
    r.add_argument("--fit-model", choices=("zeta", "zeta-delta"), default="zeta-delta")
    r.add_argument("-o", "--out", default="run")
    r.set_defaults(func=cmd_run)

    f = sub.add_parser("fit", help="Boltzmann fit of counts against an energy polynomial")
    f.add_argument("counts")
    f.add_argument("pubo")
    f.add_argument("--model", choices=("zeta", "zeta-delta"), default="zeta-delta")
    f.add_argument("--shots", type=int, default=DEFAULT_SHOTS, help="weight for probability files")
    f.add_argument("-o", "--out")
    f.set_defaults(func=cmd_fit)

    m = sub.add_parser("metrics", help="distances between two counts/distribution files")
    m.add_argument("p")
    m.add_argument("q")
    m.add_argument("--metric", choices=("all", *METRICS), default="all")
    m.add_argument("-o", "--out")
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("sweep", help="LR-QAOA depth or fidelity-scaling sweep to CSV")
    s.add_argument("kind", choices=KINDS)
    s.add_argument("--points", default="", help="depths, or half-decade exponents k")
    s.add_argument("--depth", type=int, default=1, help="fixed depth for fidelity sweeps")
    s.add_argument("--half-decades", type=float, default=0.0, help="fixed scaling for depth sweeps")
    s.add_argument("--pubo")
    s.add_argument("--snapshot")
    s.add_argument("--topology", choices=("line", "ring", "full"), default="line")
    s.add_argument("--fit-model", choices=("zeta", "zeta-delta"), default="zeta-delta")
    s.add_argument("--shots", type=int, default=DEFAULT_SHOTS)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("-o", "--out", default="sweep")
    _add_instance_args(s)
    s.set_defaults(func=cmd_sweep)
    return parser


def parse_args(argv: Sequence[str]) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        # config values act as defaults: re-parse so explicit flags override them
        values = load_config(args.config)
        sub = parser._subparsers._group_actions[0].choices[args.command]  # noqa: SLF001
        known = {a.dest for a in sub._actions}  # noqa: SLF001
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValidationError(f"{args.config}: unknown keys {unknown}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    return args


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
