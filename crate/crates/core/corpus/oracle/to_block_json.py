"""Convert principal_blocks_p3.out into block-record JSON files."""
import json
import re
import sys
from pathlib import Path


def parse(text):
    records, cur = [], None
    for line in text.splitlines():
        if line.startswith("BEGIN "):
            cur = {"id": line.split()[1]}
        elif line == "END":
            records.append(cur)
            cur = None
        elif cur is not None:
            key, _, value = line.partition(" ")
            cur[key] = value
    return records


def main(src, dest):
    for rec in parse(Path(src).read_text()):
        name = rec["name"]
        block = {
            "group_id": name,
            "prime": 3,
            "block_tag": "principal",
            "defect": int(rec["defect"]),
            "group_p_valuation": int(rec["valuation"]),
            "p_rank": int(rec["prank"]),
            "wild": True,
            "decomposition": {
                "ordinary_labels": rec["ordinary"].split(),
                "brauer_labels": rec["brauer"].split(),
                "matrix": json.loads(rec["decomposition"]),
            },
            "simple_dims": json.loads(rec["dims"]),
            "notes": (
                "provenance: ORACLE; oracle: GAP 4 ctbllib, "
                f"DecompositionMatrix(CharacterTable(\"{name}\") mod 3, b) for the block b "
                "containing the trivial character (oracle/principal_blocks_p3.g); "
                f"|G| = {rec['order']}"
            ),
        }
        out = Path(dest) / f"{rec['id']}.block.json"
        text = json.dumps(block, indent=2)
        # one matrix row per line
        text = re.sub(r"\[\s*(-?\d+(?:,\s*-?\d+)*)\s*\]",
                      lambda m: "[" + ", ".join(re.findall(r"-?\d+", m.group(1))) + "]", text)
        text = re.sub(r"\[\s*(\"[^\]]*)\]",
                      lambda m: "[" + ", ".join(re.findall(r'"[^"]*"', m.group(1))) + "]", text)
        out.write_text(text + "\n")
        print(out)


if __name__ == "__main__":
    main(sys.argv[1], sys.argv[2])
