"""
Size of the tests for the LSTAR null
====================================

Simulate from the LSTAR model at the published estimates (design C1) and
test the LSTAR-with-normal-errors null. Each rep refits B LSTAR models, so
this is the slowest experiment in the package: 10-20 seconds per rep at
B = 99 on one core. REPS=200 takes about an hour; WORKERS spreads reps
over processes.
"""

import os

from mvspectest import BootstrapConfig, DgpSpec, run_experiment

REPS = int(os.environ.get("REPS", 20))
WORKERS = int(os.environ.get("WORKERS", 1))

res = run_experiment(DgpSpec("C1", T=100), "h0nar", reps=REPS, cfg=BootstrapConfig(B=99, seed=11),
                     workers=WORKERS)
print(res.format_table())
print("%d reps in %.0fs" % (res.reps, res.wall_time))
