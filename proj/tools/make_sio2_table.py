#!/usr/bin/env python3
"""Generate data/sio2_nk.dat: a synthetic amorphous-silica optical table.

The table is a Lorentz-oscillator model tuned to the familiar landmarks of
fused silica (static permittivity near 3.8, visible-range index near 1.48,
strong mid-IR phonon absorption, UV electronic absorption). It is a smooth
stand-in for measured data, not a digitized experimental dataset.
"""

import argparse

import numpy as np

# (center [eV], strength, width [eV])
OSCILLATORS = [
    (0.0556, 0.93, 0.004),  # asymmetric Si-O-Si stretch
    (0.0987, 0.05, 0.006),  # weak bending mode
    (0.1332, 0.66, 0.008),  # second stretch band
    (10.6, 0.10, 0.8),      # exciton-like UV edge
    (13.4, 1.10, 1.0),      # main electronic absorption
]


def permittivity(w):
    eps = np.ones_like(w, dtype=complex)
    for w0, s, g in OSCILLATORS:
        eps += s * w0**2 / (w0**2 - w**2 - 1j * g * w)
    return eps


def build_grid(lo=0.002, hi=40.0, base=300, fine=100):
    # ~10 samples per linewidth across each resonance so the tabulated peaks
    # carry their full dispersion-integral weight.
    pts = list(np.geomspace(lo, hi, base))
    for w0, _s, g in OSCILLATORS:
        half = 8.0 * g
        pts.extend(np.linspace(max(lo, w0 - half), min(hi, w0 + half), fine))
    return np.unique(np.round(np.array(pts), 10))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("-o", "--out", default="data/sio2_nk.dat")
    args = ap.parse_args()

    w = build_grid()
    nk = np.sqrt(permittivity(w))  # principal root: n > 0, k >= 0

    with open(args.out, "w") as f:
        f.write("# Synthetic amorphous-SiO2 optical constants (Lorentz model).\n")
        f.write("# Generated by tools/make_sio2_table.py; not measured data.\n")
        f.write("# columns: photon_energy[eV]  n  k\n")
        for wi, v in zip(w, nk):
            f.write(f"{wi:.10e} {v.real:.10e} {max(v.imag, 0.0):.10e}\n")
    print(f"wrote {len(w)} rows to {args.out}")
    print(f"eps(0) = {permittivity(np.array([1e-9]))[0].real:.6f}")
    print(f"n(2 eV) = {np.sqrt(permittivity(np.array([2.0])))[0].real:.6f}")


if __name__ == "__main__":
    main()
