"""Write the Joe-Kuo new-joe-kuo-6.21201 table from the copy bundled with scipy.

scipy stores the same table as (poly, vinit) arrays, where ``poly`` carries the
leading and trailing coefficients of each primitive polynomial.  This script
strips them back to the published ``d s a m_1 ... m_s`` layout.

    python scripts/export_direction_numbers.py src/medianqmc/data/new-joe-kuo-6.21201.gz
"""

import gzip
import os
import sys

import numpy as np
import scipy.stats


def main(out_path):
    npz = os.path.join(os.path.dirname(scipy.stats.__file__), "_sobol_direction_numbers.npz")
    data = np.load(npz)
    poly, vinit = data["poly"], data["vinit"]
    lines = ["d       s       a       m_i"]
    # row 0 of the scipy table is dimension 1 (van der Corput), which the file omits
    for d in range(2, len(poly) + 1):
        p = int(poly[d - 1])
        degree = p.bit_length() - 1
        a = (p >> 1) & ((1 << (degree - 1)) - 1)
        m = " ".join(str(int(v)) for v in vinit[d - 1, :degree])
        lines.append(f"{d}       {degree}       {a}       {m} ")
    opener = gzip.open if out_path.endswith(".gz") else open
    with opener(out_path, "wt", encoding="ascii") as fh:
        fh.write("\n".join(lines) + "\n")
    print(f"wrote {len(lines) - 1} rows to {out_path}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "new-joe-kuo-6.21201")
