"""
Presets, artifacts and the command line
=======================================

Presets bundle configurations with the checks their results should pass.
The same runner is reachable from the shell with ``python -m setwise_cd``.
"""

import subprocess
import sys
import tempfile
from pathlib import Path

from setwise_cd import run_preset

out = Path(tempfile.mkdtemp())
report = run_preset("parallel-crafted-N4", seeds=range(10), out=out)
for name, ok in report.checks.items():
    print("PASS" if ok else "FAIL", name)
print("speedups:", report.speedups)
print("artifacts:", sorted(p.name for p in out.iterdir())[:4], "...", flush=True)

# the command line runs presets, configs, spectra and certificates
subprocess.run([sys.executable, "-m", "setwise_cd", "--help"], check=True)
