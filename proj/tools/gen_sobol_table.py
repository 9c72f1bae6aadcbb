#!/usr/bin/env python3
"""Regenerates src/sobol_direction_numbers.inc from the Joe-Kuo
new-joe-kuo-6.21201 table shipped with SciPy (first 64 dimensions)."""
import os
import sys

import numpy as np
import scipy

DIMS = 64

def main(out_path):
    table = np.load(os.path.join(os.path.dirname(scipy.__file__), "stats",
                                 "_sobol_direction_numbers.npz"))
    poly, vinit = table["poly"], table["vinit"]
    lines = ["// Generated by tools/gen_sobol_table.py. Do not edit.",
             "// Joe-Kuo new-joe-kuo-6.21201 direction numbers, dimensions 1..64.",
             "// {degree, coefficients, {m_1, ..., m_degree}}; dimension 1 is van der Corput."]
    for d in range(DIMS):
        p = int(poly[d])
        degree = p.bit_length() - 1
        coeff = (p >> 1) & ((1 << max(degree - 1, 0)) - 1) if degree > 0 else 0
        ms = [int(v) for v in vinit[d][:max(degree, 1)]]
        lines.append("{%d, %d, {%s}}," % (degree, coeff, ", ".join(map(str, ms))))
    with open(out_path, "w") as fh:
        fh.write("\n".join(lines) + "\n")

if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "src/sobol_direction_numbers.inc")
