#!/usr/bin/env python3
"""Regenerate src/sobol_directions.inc.

The initial direction numbers are the Joe & Kuo "new-joe-kuo-6.21201" set
(S. Joe and F. Y. Kuo, "Constructing Sobol sequences with better
two-dimensional projections", SIAM J. Sci. Comput. 30, 2635-2654, 2008),
read from the copy SciPy ships in scipy/stats/_sobol_direction_numbers.npz.
Row 0 is the van der Corput dimension (degree 0).

Usage: python3 tools/gen_sobol_directions.py [num_dims] > src/sobol_directions.inc
"""
import os
import sys

import numpy as np
import scipy.stats

num_dims = int(sys.argv[1]) if len(sys.argv) > 1 else 1024
path = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
table = np.load(path)
poly = table["poly"][:num_dims]
vinit = table["vinit"][:num_dims]

print("// Generated by tools/gen_sobol_directions.py. Do not edit.")
print("// Joe & Kuo new-joe-kuo-6.21201 initial direction numbers, first %d dimensions." % num_dims)
print("// Row format: {degree, coefficients a (interior polynomial bits), {m_1, ..., m_degree}}")
for p, m in zip(poly, vinit):
    p = int(p)
    degree = p.bit_length() - 1
    a = (p >> 1) & ((1 << max(degree - 1, 0)) - 1)
    ms = ", ".join(str(int(v)) for v in m[:max(degree, 1)])
    print("{%d, %d, {%s}}," % (degree, a, ms))
