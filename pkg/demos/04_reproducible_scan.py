"""A cached scan through the CLI, rerun warm to show the CSV is reproducible."""
import hashlib
import io
import json
import tempfile
from pathlib import Path

from cyclo.cli import cache_load, run

with tempfile.TemporaryDirectory() as tmp:
    cache = Path(tmp) / "heights.jsonl"
    summary = Path(tmp) / "summary.json"
    argv = ["scan", "--max", "2000", "--psi", "loglog", "--B-tau", "10",
            "--cache", str(cache), "--summary", str(summary)]

    digests = []
    for label in ("cold", "warm"):
        out = io.StringIO()
        assert run(argv, out=out) == 0
        digests.append(hashlib.sha256(out.getvalue().encode()).hexdigest())
        print(f"{label}: {len(out.getvalue().splitlines()) - 1} rows, sha256 {digests[-1][:16]}...")
    print("identical:", digests[0] == digests[1])

    entries = cache_load(cache)
    print(f"cache holds {len(entries)} entries, e.g. {entries[1680].to_line()}")
    doc = json.loads(summary.read_text())
    for row in doc["by_decade"]:
        print(f"  x = {row['x']:>5}: A0 > n^psi: {row['prop21_exceptions']},"
              f" B checked {row['theorem12_checked']}, over n^(tau psi): {row['theorem12_exceptions']}")
