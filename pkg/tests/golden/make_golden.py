"""Regenerate the frozen convergence values for the reference pair.

    python3 tests/golden/make_golden.py

Writes convergence_reference.json next to this script.  Only rerun when
the convergence computation changes on purpose.
"""

import json
import platform
import sys
import time
from pathlib import Path

import freetwist
from freetwist.dynamics import stable_current_convergence
from freetwist.pipeline import reference_pair

PARAMS = {"nList": [2, 4, 8, 16], "mMax": 6, "R": 3, "budget": 10_000_000, "fillingLength": 6}


def main():
    T1, T2, ell = reference_pair(3)
    start = time.perf_counter()
    rep = stable_current_convergence(T1, T2, tuple(PARAMS["nList"]), PARAMS["mMax"], PARAMS["R"],
                                     PARAMS["budget"], PARAMS["fillingLength"])
    elapsed = time.perf_counter() - start
    doc = {
        "provenance": {
            "generator": "tests/golden/make_golden.py",
            "package": f"freetwist {freetwist.__version__}",
            "python": platform.python_version(),
            "params": PARAMS,
            "pair": {"T1": T1.to_record(), "T2": T2.to_record(), "ell": ell},
            "seconds": round(elapsed, 1),
            "generated": time.strftime("%Y-%m-%d"),
        },
        "report": rep.to_record(),
    }
    out = Path(__file__).with_name("convergence_reference.json")
    out.write_text(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    print(f"wrote {out} in {elapsed:.1f}s", file=sys.stderr)


if __name__ == "__main__":
    main()
