"""Characteristic structure of the CGL system.

Anisotropy changes the wave speeds: with p_par > p_perp the Alfven speed
drops (firehose side) and the slow speed can exceed it. This walks p_par
across the hyperbolic range for a fixed field and p_perp, printing the
region, the three speeds and two checks on the eigenvectors.
"""
import numpy as np

from cgl1d import classify_omega, eigendecomp_cons, linear_degeneracy_check, wave_speeds
from cgl1d.eigensystem import Field

SQRT4PI = np.sqrt(4 * np.pi)
Bx, By, pperp = SQRT4PI, 0.5 * SQRT4PI, 1.0

info = classify_omega([1, 0, 0, 0, pperp, pperp, By, 0], Bx)
print(f"hyperbolic for {info.pm:.4f} <= p_par <= {info.pM:.4f}\n")
print(f"{'p_par':>8} {'region':>11} {'c_a':>8} {'c_s':>8} {'c_f':>8} {'|LR-I|':>9} {'dlam.R':>9}")
for ppar in np.linspace(info.pm * 1.01, info.pM * 0.99, 9):
    w = np.array([1.0, 0, 0, 0, ppar, pperp, By, 0])
    ws = wave_speeds(w, Bx)
    ed = eigendecomp_cons(w, Bx)
    lr = np.abs(ed.L @ ed.R - np.eye(8)).max()
    ld = abs(linear_degeneracy_check(w, Bx, Field.ALFVEN_PLUS))
    region = classify_omega(w, Bx).region.name
    print(f"{ppar:8.4f} {region:>11} {ws.ca:8.4f} {ws.cs:8.4f} {ws.cf:8.4f} {lr:9.1e} {ld:9.1e}")
