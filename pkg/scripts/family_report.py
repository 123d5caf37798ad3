"""Decompose the (2^k, 2^k - 1) + j x (2^k, 1) family and write the parity report.

Also re-verifies the three sum-of-fives claims and prints their verdicts.
"""
import argparse
import json
from pathlib import Path

from linkform.pairing import blocksum_pairing
from linkform.realize import family_report, sum_of_fives_claims, verify_realization

OUT = Path(__file__).resolve().parents[1] / "reports" / "family_report.json"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=4)
    ap.add_argument("--jmax", type=int, default=12)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    report = family_report(range(1, args.kmax + 1), range(1, args.jmax + 1))
    report["sum_of_fives"] = [
        {"k": k, "claim": label, "presentation": str(P), "target": str(target),
         "verdict": verify_realization(P, blocksum_pairing(target)).ok}
        for k in range(1, args.kmax + 1) for label, target, P in sum_of_fives_claims(k)]
    args.out.parent.mkdir(exist_ok=True)
    args.out.write_text(json.dumps(report, indent=1) + "\n")
    for row in report["rows"]:
        print(f"k={row['k']} j={row['j']:2d}  {row['blocks']}")
    print(report["parity_pattern"])
    print("pattern holds on all rows:", report["pattern_holds"])
    for c in report["sum_of_fives"]:
        print(f"k={c['k']} {c['claim']:10s} {c['presentation']:28s} -> {c['verdict']}")
