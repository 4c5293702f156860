"""Write a 159-row series simulated from the LSTAR model at the UK estimates."""

import argparse

import numpy as np

from mvspectest import DgpSpec, dgp_simulate, write_csv

parser = argparse.ArgumentParser(description=__doc__)
parser.add_argument("--seed", type=int, default=0)
parser.add_argument("-o", "--output", default="uk_standin.csv")
args = parser.parse_args()

y = dgp_simulate(DgpSpec("C1", T=159), np.random.default_rng(args.seed))
write_csv(args.output, y, header=["growth", "spread"])
print(f"wrote {len(y)} rows to {args.output}")
