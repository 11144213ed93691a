#!/usr/bin/env python3
"""Run a Monte Carlo power study from a JSON config and print the table.

Equivalent to `steinfit simulate` but handy when working from a checkout:

    python scripts/run_power_study.py scripts/configs/table_n100_desk.json out/
"""

import json
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from steinfit.cli import dumps
from steinfit.simulation import config_from_dict, config_hash, render_table, run_power_study


def main(argv):
    if len(argv) != 3:
        print(__doc__)
        return 2
    with open(argv[1]) as fh:
        cfg = config_from_dict(json.load(fh))
    workers = os.cpu_count() or 1
    print(f"config_hash: {config_hash(cfg)}  (workers={workers})")
    report = run_power_study(cfg, workers=workers)
    os.makedirs(argv[2], exist_ok=True)
    with open(os.path.join(argv[2], "report.json"), "w") as fh:
        fh.write(dumps(report.to_dict()))
    with open(os.path.join(argv[2], "report.csv"), "w") as fh:
        fh.write(render_table(report, "csv"))
    md = render_table(report, "markdown")
    with open(os.path.join(argv[2], "report.md"), "w") as fh:
        fh.write(md)
    print(md)
    print(f"done in {report.wall_time_s:.1f}s")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
