"""
Building system identification - command-line driver

Commands:
- synth:    synthetic climate CSV
- simulate: reference simulation (free-floating or on/off, thermal or heat-and-moisture)
- identify: order sweep and model JSON from a simulation CSV
- diagnose: sampling, crest-factor and spectrum diagnostics of every CSV column
- loop:     closed-loop run of a model JSON, optionally compared with a reference CSV
- case:     case studies I-V, HAM and EXT with verdict JSON
- sweep:    identification set-point sweep
- import:   identification and 12/20 degC loop from an external simulator export
- report:   text tables from verdict, sweep, order-sweep or comparison JSON

Known errors exit with status 2 and a JSON object {"error", "message"} on stderr.
"""
import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

import pandas as pd

from models.control import FREE_FLOAT, LoopTopology, OnOffController, OnOffSetpoints
from models.identification import IdentificationConfig
from models.reports import CASE_IDS
from models.run_config import CaseConfig, RunConfig
from services.case_study_service import CaseStudyService, model_signals
from services.control_service import TopologyMismatch, UnstableLoop, simulate_closed_loop, within_band_fraction
from services.identification_service import (
    IdentificationError,
    estimate_oe,
    select_order,
    validate,
)
from services.reference_simulator import InstabilityDetected, ReferenceSimulator, synth_climate
from services.signal_service import ZeroPowerSignal, diagnose, spectrum, split_halves
from services.validation_service import GridMismatch, compare
from utils.building_config import ConfigError, load_building
from utils.csv_io import FLOAT_FORMAT, FormatError, atomic_writer, read_climate, read_result, read_series, write_climate, write_result
from utils.model_io import load_model, read_json, save_model, write_json
from utils.report_utils import order_table, render_report, sweep_table, verdict_table

logger = logging.getLogger("driver")

KNOWN_ERRORS = (
    ConfigError,
    FormatError,
    FileNotFoundError,
    ValueError,
    IdentificationError,
    TopologyMismatch,
    UnstableLoop,
    GridMismatch,
    InstabilityDetected,
    ZeroPowerSignal,
)

DEFAULT_SWEEP_PAIRS = "16,22;18,22;20,22;21,22"


def print_header(title):
    """Print a formatted section header."""
    print("\n" + "=" * 80)
    print(f"{title:^80}")
    print("=" * 80)


def parse_orders(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--orders expects comma-separated integers, got '{text}'")


def parse_setpoints(text: str) -> OnOffSetpoints:
    try:
        return OnOffSetpoints.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def parse_pairs(text: str) -> List[OnOffSetpoints]:
    return [parse_setpoints(pair) for pair in text.split(";") if pair.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="Seed of every random component")
    common.add_argument("--dt", type=float, help="Sample period in seconds")
    common.add_argument("--orders", type=parse_orders, help="Model orders, e.g. 1,2,4,8")
    common.add_argument("--setpoints", type=parse_setpoints, help="Th,Tc[,RHh,RHd]")
    common.add_argument("--topology", choices=[t.value for t in LoopTopology],
                        default=LoopTopology.HVAC_SEPARATE_INPUT.value,
                        help="How Q_hvac enters the model")
    common.add_argument("--out", default=".", help="Output directory")
    common.add_argument("--building", help="Building config (default data/building4.cfg)")
    common.add_argument("--zone", default="zone1", help="Zone to identify or report")
    common.add_argument("--workers", type=int, default=1, help="Parallel worker processes")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = argparse.ArgumentParser(description="Building system identification toolkit")
    commands = parser.add_subparsers(dest="command", required=True)

    synth = commands.add_parser("synth", parents=[common], help="Write a synthetic climate CSV")
    synth.add_argument("--days", type=int, default=365)
    synth.add_argument("--start", default="2021-01-01")
    synth.add_argument("--no-heat-wave", action="store_true")

    simulate = commands.add_parser("simulate", parents=[common], help="Reference simulation")
    simulate.add_argument("--climate", help="Climate CSV; synthesized from --seed when absent")
    simulate.add_argument("--days", type=int, default=365)
    simulate.add_argument("--ham", action="store_true", help="Coupled heat and moisture")
    simulate.add_argument("--internal-gains", action="store_true")

    identify = commands.add_parser("identify", parents=[common], help="Identify from a simulation CSV")
    identify.add_argument("input", help="Simulation or export CSV")
    identify.add_argument("--method", choices=["subspace", "oe"], default="subspace")
    identify.add_argument("--moisture", action="store_true", help="Identify T_i and X_i")
    identify.add_argument("--internal-gains", action="store_true")

    diag = commands.add_parser("diagnose", parents=[common], help="Diagnostics of every CSV column")
    diag.add_argument("input", help="Time-series CSV")

    loop = commands.add_parser("loop", parents=[common], help="Closed loop around a model JSON")
    loop.add_argument("model", help="Model JSON")
    loop.add_argument("--climate", help="Climate CSV; synthesized from --seed when absent")
    loop.add_argument("--reference", help="Reference simulation CSV to compare against")
    loop.add_argument("--days", type=int, default=365)

    case = commands.add_parser("case", parents=[common], help="Run case studies")
    case.add_argument("cases", nargs="+", help=f"Case ids ({', '.join(CASE_IDS)}) or 'all'")
    case.add_argument("--days", type=int, default=365)
    case.add_argument("--import-csv", help="External export used by case EXT")
    case.add_argument("--timing", action="store_true",
                      help="Write wall-clock runtimes and the SI speedup into the verdict JSON")

    sweep = commands.add_parser("sweep", parents=[common], help="Identification set-point sweep")
    sweep.add_argument("--pairs", type=parse_pairs, default=parse_pairs(DEFAULT_SWEEP_PAIRS),
                       help="Th,Tc;Th,Tc;... identification pairs")
    sweep.add_argument("--days", type=int, default=365)

    imp = commands.add_parser("import", parents=[common], help="Identify from an external export")
    imp.add_argument("input", help="Export CSV (To_C, Qsolar_W, Ti_<zone>_C, Qhvac_<zone>_W, ...)")

    report = commands.add_parser("report", parents=[common], help="Render JSON reports as tables")
    report.add_argument("inputs", nargs="+", help="Verdict, sweep, order-sweep or comparison JSON")
    return parser


def make_run_config(args) -> RunConfig:
    inputs = []
    for name in ("input", "model", "climate", "reference", "import_csv"):
        value = getattr(args, name, None)
        if value:
            inputs.append(value)
    inputs.extend(getattr(args, "inputs", None) or [])
    return RunConfig(
        out_dir=args.out,
        seed=args.seed,
        dt=args.dt,
        orders=args.orders,
        setpoints=args.setpoints,
        topology=LoopTopology(args.topology),
        building_path=args.building,
        input_paths=inputs,
        cases=getattr(args, "cases", None),
        workers=args.workers,
    )


def make_case_config(args, config: RunConfig, orders=None) -> CaseConfig:
    kwargs = {
        "building": load_building(config.building_path),
        "zone": args.zone,
        "days": getattr(args, "days", 365),
    }
    if kwargs["days"] < 24:
        # default fine-step window covers days 10-24
        kwargs.update(fine_start_day=0, fine_days=max(1, kwargs["days"] // 2))
    if config.dt is not None:
        kwargs["dt"] = config.dt
    if config.setpoints is not None:
        kwargs["identification_setpoints"] = config.setpoints
    if orders:
        kwargs["orders"] = orders
    return CaseConfig(**kwargs)


def cmd_synth(args, config: RunConfig) -> int:
    climate = synth_climate(config.seed, start=args.start, days=args.days, dt=config.dt or 3600.0,
                            heat_wave=not args.no_heat_wave)
    path = write_climate(config.output_path("climate.csv"), climate)
    print(f"Synthetic climate: {len(climate)} samples -> {path}")
    return 0


def _climate(args, config: RunConfig, building):
    if args.climate:
        return read_climate(args.climate, dt=config.dt)
    return synth_climate(config.seed, days=args.days, dt=config.dt or 3600.0, pressure=building.pressure)


def cmd_simulate(args, config: RunConfig) -> int:
    building = load_building(config.building_path)
    climate = _climate(args, config, building)
    simulator = ReferenceSimulator(building)
    controller = OnOffController(config.setpoints) if config.setpoints else FREE_FLOAT
    run = simulator.simulate_ham if args.ham else simulator.simulate
    result = run(climate, controller, dt_output=config.dt, internal_gains=args.internal_gains)
    path = write_result(config.output_path("simulation.csv"), result)
    for warning in result.warnings:
        print(f"warning: {warning}")
    print(f"Reference simulation of '{building.name}' ({len(result)} steps, "
          f"{result.runtime_s:.2f} s) -> {path}")
    return 0


def cmd_identify(args, config: RunConfig) -> int:
    data = read_result(args.input, dt=config.dt)
    inputs, outputs = model_signals(data, args.zone, config.topology, args.internal_gains, args.moisture)
    if args.method == "oe":
        if args.moisture:
            raise ValueError("Output-error models have a single output; drop --moisture")
        est_in, val_in = zip(*(split_halves(s) for s in inputs))
        est_out, val_out = split_halves(outputs[0])
        model = estimate_oe(list(est_in), est_out)
        fit = validate(model, list(val_in), [val_out])
        save_model(config.output_path("model.json"), model)
        print(f"{model!r}: mu_e {fit.mu_e:.4g} degC, fit {fit.fit_percent:.2f} %")
        return 0

    orders = config.orders or [1, 2, 4, 8]
    rows = select_order(inputs, outputs, orders, IdentificationConfig())
    write_json(config.output_path("order_sweep.json"),
               {"kind": "order_sweep", "zone": args.zone, "topology": config.topology.value,
                "rows": [row.to_dict() for row in rows]})
    print_header(f"Order sweep on {args.zone}")
    print(order_table([row.to_dict() for row in rows]))
    usable = [row for row in rows if row.ok]
    if not usable:
        raise IdentificationError("No order could be identified: " + "; ".join(r.error for r in rows))
    best = min(usable, key=lambda row: (row.report.mu_e, row.order))
    save_model(config.output_path("model.json"), best.model)
    print(f"\nOrder {best.order} saved to {config.output_path('model.json')}")
    return 0


def cmd_diagnose(args, config: RunConfig) -> int:
    series = read_series(args.input, dt=config.dt)
    diagnostics = []
    for s in series:
        diagnostics.append(diagnose(s).to_dict())
        if len(s) >= 4:
            spec = spectrum(s)
            frame = pd.DataFrame({"freq_hz": spec.freqs_hz, "magnitude": spec.magnitudes})
            with atomic_writer(config.output_path(f"spectrum_{s.name}.csv")) as handle:
                frame.to_csv(handle, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    write_json(config.output_path("diagnostics.json"), {"kind": "diagnostics", "series": diagnostics})
    print_header(f"Diagnostics of {args.input}")
    frame = pd.DataFrame(diagnostics)[["name", "sample_freq_hz", "nyquist_freq_hz", "crest_raw", "crest_centered"]]
    print(frame.to_string(index=False))
    return 0


def cmd_loop(args, config: RunConfig) -> int:
    building = load_building(config.building_path)
    model = load_model(args.model)
    setpoints = config.setpoints or OnOffSetpoints(18.0, 22.0)
    reference = read_result(args.reference, dt=config.dt) if args.reference else None
    if reference is not None:
        climate = reference.climate
        solar = reference.zones[args.zone].solar_gain if args.zone in reference.zones else None
    else:
        climate = _climate(args, config, building)
        solar = None
    result = simulate_closed_loop(model, climate, setpoints, building.hvac, topology=config.topology,
                                  zone=args.zone, solar_gain=solar)
    write_result(config.output_path("loop.csv"), result)
    bands = within_band_fraction(result, setpoints)
    print(f"Closed loop at {setpoints.label()}: {bands['aggregate']:.1f} % of samples within band")
    for warning in result.warnings:
        print(f"warning: {warning}")
    if reference is not None:
        report = compare(reference, result, [args.zone])
        data = dict(report.to_dict(), kind="comparison", within_band_pct=bands["aggregate"])
        write_json(config.output_path("comparison.json"), data)
        print(render_report(data, title="Comparison with reference"))
    return 0


def cmd_case(args, config: RunConfig) -> int:
    case_ids = list(CASE_IDS) if [c.lower() for c in config.cases] == ["all"] else config.cases
    unknown = [c for c in case_ids if c not in CASE_IDS]
    if unknown:
        raise ValueError(f"Unknown case id(s) {unknown}; expected {', '.join(CASE_IDS)} or 'all'")
    orders = {case_id: config.orders[0] for case_id in case_ids} if config.orders else None
    case_config = make_case_config(args, config, orders)
    case_config.import_path = args.import_csv
    verdicts = CaseStudyService(case_config).run_cases(case_ids, config.seed, config.workers)
    for verdict in verdicts:
        write_json(config.output_path(f"case{verdict.case_id}_verdict.json"), verdict.to_dict(args.timing))
    print_header("Case studies")
    print(verdict_table([v.to_dict() for v in verdicts]))
    for verdict in verdicts:
        if verdict.timing is not None:
            print(f"Case {verdict.case_id}: SI loop {verdict.timing.runtime_si:.3f} s, reference "
                  f"{verdict.timing.runtime_ref:.3f} s, speedup {verdict.timing.speedup:.1f}x")
    return 0


def cmd_sweep(args, config: RunConfig) -> int:
    case_config = make_case_config(args, config)
    rows = CaseStudyService(case_config).setpoint_sweep(args.pairs, config.orders or [4, 8],
                                                        config.seed, config.workers)
    data = {"kind": "setpoint_sweep", "seed": config.seed,
            "application_setpoints": case_config.application_setpoints.to_dict(),
            "rows": [row.to_dict() for row in rows]}
    write_json(config.output_path("sweep.json"), data)
    print_header("Identification set-point sweep")
    print(sweep_table(data["rows"]))
    return 0


def cmd_import(args, config: RunConfig) -> int:
    data = read_result(args.input, dt=config.dt)
    orders = {"EXT": config.orders[0]} if config.orders else None
    case_config = make_case_config(args, config, orders)
    if config.setpoints is not None:
        case_config.ext_setpoints = config.setpoints
    case_config.sensor_noise = 0.0
    verdict, identified = CaseStudyService(case_config).evaluate_external(data, config.seed, source=args.input)
    save_model(config.output_path("model.json"), identified.model)
    write_json(config.output_path("caseEXT_verdict.json"), verdict.to_dict())
    print(render_report(verdict.to_dict(), title=f"Import of {args.input}"))
    print(f"\nWithin {case_config.ext_setpoints.label()}: "
          f"{verdict.details['within_band_pct']:.1f} % of samples (data: "
          f"{verdict.details['within_band_pct_data']:.1f} %)")
    return 0


def cmd_report(args, config: RunConfig) -> int:
    texts = [render_report(read_json(path), title=Path(path).name) for path in args.inputs]
    text = "\n\n".join(texts) + "\n"
    with atomic_writer(config.output_path("report.txt")) as handle:
        handle.write(text)
    print(text, end="")
    return 0


COMMANDS = {
    "synth": cmd_synth,
    "simulate": cmd_simulate,
    "identify": cmd_identify,
    "diagnose": cmd_diagnose,
    "loop": cmd_loop,
    "case": cmd_case,
    "sweep": cmd_sweep,
    "import": cmd_import,
    "report": cmd_report,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        config = make_run_config(args)
        config.check_paths()
        return COMMANDS[args.command](args, config)
    except KNOWN_ERRORS as exc:
        logger.debug("Command failed", exc_info=True)
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
