"""Command line entry points: run, trial, summarize, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness, report, voice
from .agent import AgentParams
from .session import SessionConfig, SimSession, frame_to_json


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="echograsp",
        description="Audio-guided reach-and-grasp simulator and experiment harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a whole experiment from a config file")
    p_run.add_argument("--config", required=True, help="experiment config JSON")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p_trial = sub.add_parser("trial", help="run one scripted trial")
    p_trial.add_argument("--seed", type=int, default=0)
    p_trial.add_argument("--placement", type=int, default=None, help="fan segment index")
    p_trial.add_argument("--watch", action="store_true", help="print every frame as JSON lines")
    p_trial.add_argument("--agent", default=None, help="agent params as inline JSON")

    p_sum = sub.add_parser("summarize", help="recompute statistics from a records CSV")
    p_sum.add_argument("--in", dest="infile", required=True, help="records.csv path")
    p_sum.add_argument("--out", default=None, help="directory for summary.json and figures")
    p_sum.add_argument("--no-figures", action="store_true")

    p_serve = sub.add_parser("serve", help="start the WebSocket session service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8765)

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    config = harness.ExperimentConfig.from_json_file(args.config)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    total = len(config.subjects) * config.trials_per_subject
    done = [0]

    def progress(record: harness.TrialRecord) -> None:
        done[0] += 1
        status = "ok" if record.success else f"fail:{record.fail_reason}"
        print(
            f"[{done[0]}/{total}] {record.subject_id} trial {record.trial_index} "
            f"placement {record.placement_index} t1={record.t1_s:.2f}s "
            f"t2={record.t2_s:.2f}s {status}"
        )

    records = harness.run_experiment(config, on_record=progress)
    harness.write_csv(records, out / "records.csv")
    harness.write_json(records, out / "records.json")
    summary = harness.summarize(records)
    harness.write_summary(summary, out / "summary.json")
    written = [out / "records.csv", out / "records.json", out / "summary.json"]
    if not args.no_figures:
        written += report.render_report(records, out)
    _print_summary(summary)
    print("wrote: " + ", ".join(str(p) for p in written))
    return 0


def _cmd_trial(args: argparse.Namespace) -> int:
    agent = AgentParams()
    if args.agent:
        agent = AgentParams.from_json_dict(json.loads(args.agent))
    session = SimSession(SessionConfig(seed=args.seed, agent=agent, mode="agent_driven"))
    if args.placement is not None:
        session.start_trial(args.placement)
    ack = voice.dispatch(voice.Command(voice.CommandKind.GRASP, "bottle"), session)
    if not ack.get("ok"):
        print(f"grasp command rejected: {ack}", file=sys.stderr)
        return 1
    max_ticks = int(session.config.thresholds.timeout / session.config.arena.tick) + 100
    for _ in range(max_ticks):
        frame = session.tick(collect_frame=args.watch)
        if args.watch and frame is not None:
            print(frame_to_json(frame))
        if session.trial_done:
            break
    t1, t2 = session.clocks()
    result = {
        "placement_index": session.current_placement,
        "seed": args.seed,
        "t1_s": t1,
        "t2_s": t2,
        "success": bool(session.gstate.success),
        "fail_reason": session.gstate.fail_reason,
        "ticks": session.world.tick_index,
    }
    print(json.dumps(result, sort_keys=True))
    return 0 if result["success"] else 2


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = harness.read_csv(args.infile)
    summary = harness.summarize(records)
    _print_summary(summary)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        harness.write_summary(summary, out / "summary.json")
        written = [out / "summary.json"]
        if not args.no_figures:
            written += report.render_report(records, out)
        print("wrote: " + ", ".join(str(p) for p in written))
    return 0


def _print_summary(summary: dict) -> None:
    print(f"{'subject':<12}{'trials':>7}{'success':>9}{'t1 mean':>9}{'t2 mean':>9}")
    for sid, stats in sorted(summary["subjects"].items()):
        print(
            f"{sid:<12}{stats['trials']:>7}"
            f"{stats['success_rate']:>9.2f}"
            f"{stats['t1_s']['mean']:>9.2f}"
            f"{stats['t2_s']['mean']:>9.2f}"
        )
    overall = summary["overall"]
    if overall["trials"]:
        print(
            f"{'overall':<12}{overall['trials']:>7}"
            f"{overall['success_rate']:>9.2f}"
            f"{overall['t1_s']['mean']:>9.2f}"
            f"{overall['t2_s']['mean']:>9.2f}"
        )


def _cmd_serve(args: argparse.Namespace) -> int:
    from .service import run_server

    print(f"session service listening on ws://{args.host}:{args.port}/session")
    run_server(host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "trial": _cmd_trial,
        "summarize": _cmd_summarize,
        "serve": _cmd_serve,
    }
    return handlers[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
