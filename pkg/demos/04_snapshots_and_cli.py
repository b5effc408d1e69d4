"""Reproducible runs through the command-line interface.

Writes a config, executes `admbouss run` twice, and shows the output
trees agree byte for byte.  Then restarts from a mid-run snapshot with
`admbouss resume` and confirms the continued trajectory lands on the
same final snapshot, bit for bit.
"""

import tempfile
import textwrap
from pathlib import Path

from admbouss.cli import main as admbouss

CONFIG = """
[grid]
modes_per_axis = 16

[physics]
nu = 0.1
alpha = 1.0
epsilon = 0.1
order = 5

[time]
dt = 0.01
t_end = 0.1
observer_cadence = 2

[initial]
preset = "random-band"
seed = 21

[output]
directory = "%s"
snapshot_interval = 2
"""


def write_config(root, directory):
    path = root / f"{directory}.toml"
    path.write_text(textwrap.dedent(CONFIG % directory))
    return path


def main():
    root = Path(tempfile.mkdtemp(prefix="admbouss-demo-"))
    print(f"working under {root}")

    for name in ("first", "second"):
        code = admbouss(["run", str(write_config(root, name)),
                         "--output-root", str(root)])
        assert code == 0
    same = all(
        (root / "first" / rel).read_bytes() == (root / "second" / rel).read_bytes()
        for rel in ("energy.csv", "norms.csv", "snapshots/final.admb"))
    print(f"two identical runs, byte-identical outputs: {same}")

    mid = root / "first" / "snapshots" / "snap_000002.admb"
    code = admbouss(["resume", str(mid), str(write_config(root, "cont")),
                     "--output-root", str(root)])
    assert code == 0
    resumed = (root / "cont" / "snapshots" / "final.admb").read_bytes()
    straight = (root / "first" / "snapshots" / "final.admb").read_bytes()
    print(f"resume from t = 0.04 reaches the same final snapshot: "
          f"{resumed == straight}")

    print()
    admbouss(["check-symbols", "--alpha", "0.5", "--order", "3",
              "--modes", "4"])


if __name__ == "__main__":
    main()
