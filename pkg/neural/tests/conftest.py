import subprocess
import sys
from pathlib import Path

import pytest


def simulate(out_dir, seed, duration=1.0, extra=()):
    """Invoke the localizer CLI to render a scene folder."""
    cmd = [
        sys.executable, "-m", "srploc", "simulate",
        "--out-dir", str(out_dir), "--seed", str(seed),
        "--duration", str(duration), "--rt60", "0.25", "--snr", "20",
        "--order", "4", "--static", "--continuous-activity",
        "--room-min", "3.5", "3.0", "2.5", "--room-max", "5.0", "4.5", "3.0",
        "--save-oracle-features", *extra,
    ]
    subprocess.run(cmd, check=True, capture_output=True, text=True)
    return Path(out_dir)


@pytest.fixture(scope="session")
def scene(tmp_path_factory):
    """One rendered scene shared across tests."""
    return simulate(tmp_path_factory.mktemp("scene") / "s0", seed=42)


@pytest.fixture(scope="session")
def geometry_file(tmp_path_factory, scene):
    """Built-in array geometry exported through the primary CLI format."""
    path = tmp_path_factory.mktemp("geom") / "head12.txt"
    code = (
        "from srploc.geometry import builtin_array, save_geometry;"
        f"save_geometry(r'{path}', builtin_array())"
    )
    subprocess.run([sys.executable, "-c", code], check=True)
    return path
