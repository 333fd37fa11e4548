#!/usr/bin/env python3
"""Decay under frequent null-result photon detections: the Zeno slow-down.

Projective photon measurements repeat every tau; as long as no photon is
seen, the excited amplitude contracts by a(tau) per interval.  The survival
probability after n intervals is |a(tau)^n|^2, and it depends on the
measurement interval only through x = Lambda*tau.  Small x freezes the
decay (quantum Zeno regime); large x recovers unobserved decay.

Each x writes a CSV with the conditioned curve next to the scaled-rate law
exp(-Re gamma(x) t), which the powers approach in the frequent-measurement
limit.
"""

from pathlib import Path

import numpy as np

from zenoscope import (MemoryKernel, SpectralDensity, gamma_lorentzian,
                       null_result_survival)

OUT = Path(__file__).resolve().parent / "out"
OUT.mkdir(exist_ok=True)

LAM, T_MAX = 5.0, 10.0
kernel = MemoryKernel(SpectralDensity.lorentzian(gamma=1.0, lam=LAM))

print(f"Null-result conditioned survival, Lorentzian with Lambda = {LAM:g} Gamma")
print(f"{'x':>6} {'tau':>8} {'Re gamma(x)':>12} {'P_e(10)':>10} {'max dev vs law':>16}")

for x in (2.0, 0.2, 0.02):
    tau = x / LAM
    n = int(round(T_MAX / tau))
    times, p_e = null_result_survival(kernel, tau, n)
    law = np.exp(-gamma_lorentzian(x).real * times)
    dev = np.max(np.abs(p_e - law))

    path = OUT / f"conditioned_decay_x_{x:g}.csv"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,p_e,p_e_scaling\n")
        for t, p, r in zip(times, p_e, law):
            fh.write(f"{t:.12g},{p:.12g},{r:.12g}\n")
    print(f"{x:6g} {tau:8g} {gamma_lorentzian(x).real:12.5f} "
          f"{p_e[-1]:10.5f} {dev:16.3e}   -> {path.name}")

print("\nHalving x slows the conditioned decay; at x = 0.02 the atom is")
print("still ~91% excited after ten natural lifetimes.")
