"""Growth of analytic functions in the unit disc.

Part one compares the integral-mean orders rho_p with the max-modulus
order for a lacunary series. Part two builds a gap series whose log
max-term follows the counterexample and reports the trend of its
integral means and of its zero counts.

    python demos/02_disc_growth.py [out_dir]
"""

import sys
from pathlib import Path

from qpo.harness import config_from_dict, run_experiment

out = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_out")

for exp in ("linden", "thm2", "prop2"):
    man = run_experiment(config_from_dict({"experiment": exp}), out / exp)
    print(f"== {exp}: {man.status}")
    for name, rep in man.report_objects.items():
        print(rep)
    print("files:", ", ".join(f["name"] for f in man.files))
