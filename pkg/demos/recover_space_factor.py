"""Recover an unknown envelope f(x) from one snapshot of the averaged field.

With the time factor known, the snapshot coefficients divided by the
per-mode Duhamel weights L_n(t0) give the envelope.  A mean factor whose
first weight vanishes shows the solvability dichotomy: data with a
nonzero first snapshot coefficient admit no envelope at all, data without
it admit infinitely many.
"""

import math

from osckit import (
    SineSeries,
    SlowFunction,
    SnapshotObservation,
    mode_weight_spectrum,
    recover_space_factor,
)

t0 = 1.0
mean = SlowFunction.monomial(1.0, 1)   # r0(t) = t

spectrum = mode_weight_spectrum(mean, t0, n_max=6)
print("mode weights L_n(1):", [f"{w:.4f}" for w in spectrum.values])

# snapshot of the averaged field generated by f = sin x + sin 2x
psi = SineSeries({1: math.exp(-1.0), 2: (3.0 + math.exp(-4.0)) / 16.0})
rec = recover_space_factor(SnapshotObservation(t0, psi), mean, n_max=6)
print("recovered coefficients:",
      {n: round(rec.envelope.coefficient(n)(0.0), 12) for n in rec.envelope.modes},
      "| status:", rec.report.status)

# a mean factor engineered so L_1(1) = 0
blind = SlowFunction([(1.0, 1, 0.0), (-1.0 / (math.e - 1.0), 0, 0.0)])
spectrum = mode_weight_spectrum(blind, t0, n_max=4)
print("\nengineered mean: zero weights at modes", spectrum.zero_modes)

bad = recover_space_factor(
    SnapshotObservation(t0, SineSeries({1: 0.3, 2: 0.1})), blind, n_max=4)
print("snapshot with psi_1 != 0 ->", bad.report.status,
      "(offending modes:", bad.report.offending_modes, ")")

free = recover_space_factor(
    SnapshotObservation(t0, SineSeries({2: 0.1})), blind, n_max=4)
print("snapshot with psi_1  = 0 ->", free.report.status,
      "| zero representative f_1 =", free.envelope.coefficient(1)(0.0))
