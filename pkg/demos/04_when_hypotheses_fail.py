"""What the tool reports when a hypothesis does not hold.

Each problem file in demos/data is run through the command-line entry
point exactly as a shell user would, and the JSON report is summarized.
Exit codes: 0 certified, 1 hypothesis failed, 2 input error, 3 not found.

Run:  python demos/04_when_hypotheses_fail.py
"""

import json
import tempfile
from pathlib import Path

from cralg.io.cli import run_command

DATA = Path(__file__).resolve().parent / "data"

runs = [
    ("check-map", "quadric_automorphism.crm"),
    # codimension two, second function Levi flat: the Levi cone has empty interior
    ("extend-map", "degenerate_cone.crm"),
    # a constant map has zero differential, so the rank condition fails
    ("extend-map", "constant_map.crm"),
    # the real hyperplane: Segre varieties are parallel lines, no spanning
    ("segre", "flat_hyperplane.crm"),
    ("annihilator", "exp_series.txt"),
]

for command, name in runs:
    code, text = run_command([command, str(DATA / name)])
    res = json.loads(text)["result"]
    summary = res.get("failed_condition") or res.get("first_failure") or res.get("reason") or ""
    if command == "segre":
        lf = res["lifted_fields"]
        summary = f"lifted fields have rank {lf['rank']} < n = {lf['n']}"
    print(f"cralg {command} {name}\n   exit {code}, status {res['status']}  {summary}".rstrip())
    if "message" in res and res["message"]:
        print(f"   {res['message']}")

# A malformed file is an input error with a position.
with tempfile.TemporaryDirectory() as tmp:
    bad = Path(tmp) / "bad_input.crm"
    bad.write_text("n = 2;\nrho1 = z2 + zb2 + z1;\n")
    code, text = run_command(["levi", str(bad)])
    print(f"cralg levi bad_input.crm\n   exit {code}, {json.loads(text)['result']['message']}")
