"""Regenerate src/linkform/data/catalog.json (every entry is re-verified)."""
import argparse
import json
from pathlib import Path

from linkform.realize import catalog_document

OUT = Path(__file__).resolve().parents[1] / "src" / "linkform" / "data" / "catalog.json"

if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--kmax", type=int, default=6)
    ap.add_argument("--out", type=Path, default=OUT)
    args = ap.parse_args()
    doc = catalog_document(args.kmax)
    args.out.write_text(json.dumps(doc, indent=1) + "\n")
    print(f"wrote {len(doc['entries'])} entries and {len(doc['checks'])} checks to {args.out}")
