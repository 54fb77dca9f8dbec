"""Run every suite file and print one line per suite with its exit code and timing."""
import argparse
import time
from pathlib import Path

from hgsys.cache import RuleCache, default_cache_dir
from hgsys.cli import parse_spec, report_json, run

ROOT = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--suites", default=str(ROOT / "suites"))
    ap.add_argument("--out", default=None, help="directory for the JSON reports")
    ap.add_argument("--no-cache", action="store_true")
    args = ap.parse_args()
    cache = None if args.no_cache else RuleCache(default_cache_dir())
    out = Path(args.out) if args.out else None
    if out:
        out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.suites).glob("*.json")):
        t0 = time.perf_counter()
        report, code = run(parse_spec(path), cache)
        dt = time.perf_counter() - t0
        print(f"{path.stem:32s} exit={code}  {dt:6.2f}s  {report.summary()}")
        if out:
            (out / f"{path.stem}.report.json").write_text(report_json(report, code))


if __name__ == "__main__":
    main()
