"""Validate CLI JSON reports against the shipped schema."""
import json
import subprocess
import sys
from pathlib import Path

import jsonschema


def main() -> int:
    cli, schema_path, workdir = sys.argv[1], Path(sys.argv[2]), Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    empty_cfg = workdir / "schema_empty_config.json"
    empty_cfg.write_text('{"models": []}')
    runs = {
        "full": ["converge", "--truncation", "3", "--models",
                 "exact,background,corrector,gitc_general,gitc_cell,mixed_fem,identities",
                 "--fem-elements", "100", "--oracle-points", "4000"],
        "identities": ["verify-identities", "--truncation", "4"],
        "empty": ["converge", "-c", str(empty_cfg)],
    }
    for name, args in runs.items():
        out = workdir / f"schema_{name}.json"
        subprocess.run([cli, *args, "--json", str(out)], check=True)
        report = json.loads(out.read_text())
        jsonschema.validate(report, schema)
        print(f"{name}: {len(report['rows'])} rows valid")
    return 0


if __name__ == "__main__":
    sys.exit(main())
