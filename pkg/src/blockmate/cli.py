"""Command line: batch session runner, archetype sweeps, and the live server.

Examples:
  blockmate run --personality 0,1,0 --speaking on --seed 42 --out traces/
  blockmate run --sweep --sessions 5 --out sweep/ --validate
  blockmate serve --port 8000
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import dispatcher as disp
from . import planner as plan_mod
from .game import Board, is_complete_valid
from .personality import PersonalityVector, archetypes


def _parse_personality(text: str) -> PersonalityVector:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("personality must be 'c,e,a'")
    return PersonalityVector(*parts)


def _speaking_flag(text: str) -> bool:
    if text not in ("on", "off"):
        raise argparse.ArgumentTypeError("--speaking must be 'on' or 'off'")
    return text == "on"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="blockmate")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run batch sessions and export traces")
    run.add_argument("--personality", type=_parse_personality, default=PersonalityVector(0, 0, 0),
                     help="trait weights 'c,e,a' in [-1,1]")
    run.add_argument("--speaking", type=_speaking_flag, default=True, metavar="{on,off}")
    run.add_argument("--seed", type=int, default=1)
    run.add_argument("--sessions", type=int, default=1, help="seeds seed..seed+N-1")
    run.add_argument("--profile", default="reactive")
    run.add_argument("--out", default=None, help="directory for trace exports")
    run.add_argument("--sweep", action="store_true",
                     help="run the 12 archetypes x sessions seeds x both conditions")
    run.add_argument("--validate", action="store_true",
                     help="check invariants on every produced log")
    run.add_argument("--persist-memory", default=None, metavar="PATH",
                     help="carry the episodic reward table across sessions via this file")
    run.add_argument("--verbose", action="store_true", help="print plans and summaries")

    serve = sub.add_parser("serve", help="start the live session API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--static", default=None, help="directory with the web UI bundle")
    return parser


def _run_one(p: PersonalityVector, speaking: bool, seed: int, profile: str,
             persist: str | None) -> disp.SessionLog:
    cfg = disp.SessionConfig(
        personality=p,
        speaking=speaking,
        seed=seed,
        profile=profile,
        memory_load_path=persist if persist and Path(persist).exists() else None,
    )
    session = disp.new_session(cfg)
    log = disp.run_to_completion(session)
    if persist:
        Path(persist).write_text(session.memory.dump(), encoding="utf-8")
    return log


def _validate_log(log: disp.SessionLog) -> list[str]:
    problems = []
    if not is_complete_valid(Board.deserialize(log.summary["board"])):
        problems.append("final board invalid")
    if not log.config.speaking:
        verbal = [e for e in log.events if e.kind == "Utterance" and e.payload["modality"] == "Verbal"]
        if verbal:
            problems.append(f"{len(verbal)} verbal utterances in a Not-Speaking log")
    ticks = [e.tick for e in log.events]
    if ticks != sorted(set(ticks)):
        problems.append("event ticks not strictly increasing")
    ended = [e for e in log.events if e.kind == "SessionEnded"]
    if len(ended) != 1 or log.events[-1].kind != "SessionEnded":
        problems.append("SessionEnded missing, duplicated, or not terminal")
    return problems


def _export_all(log: disp.SessionLog, out: Path, stem: str) -> None:
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{stem}.events.jsonl").write_text(disp.export_trace(log, "events-jsonl"), encoding="utf-8")
    (out / f"{stem}.comfort.csv").write_text(disp.export_trace(log, "comfort-csv"), encoding="utf-8")
    (out / f"{stem}.trajectory.csv").write_text(disp.export_trace(log, "trajectory-csv"), encoding="utf-8")
    (out / f"{stem}.summary.json").write_text(disp.export_trace(log, "summary"), encoding="utf-8")


def cmd_run(args) -> int:
    jobs: list[tuple[str, PersonalityVector, bool, int]] = []
    if args.sweep:
        for name, vec in archetypes().items():
            for speaking in (True, False):
                for i in range(args.sessions):
                    cond = "S" if speaking else "NS"
                    jobs.append((f"{name}-{cond}-seed{args.seed + i}", vec, speaking, args.seed + i))
    else:
        for i in range(args.sessions):
            jobs.append((f"run-seed{args.seed + i}", args.personality, args.speaking, args.seed + i))

    failures = 0
    for stem, p, speaking, seed in jobs:
        log = _run_one(p, speaking, seed, args.profile, args.persist_memory)
        if args.out:
            _export_all(log, Path(args.out), stem)
        problems = _validate_log(log) if args.validate else []
        status = "ok" if not problems else "FAIL: " + "; ".join(problems)
        if problems:
            failures += 1
        print(f"{stem}: {log.summary['ticks']} events, "
              f"{log.summary['robot_placements']} robot placements [{status}]")
        if args.verbose:
            planned = next(e for e in log.events if e.kind == "Planned")
            print("  initial plan:")
            for step in planned.payload["steps"]:
                print(f"    {step}")
    return 1 if failures else 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(static_dir=args.static)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return cmd_run(args)
    return cmd_serve(args)


if __name__ == "__main__":
    sys.exit(main())
