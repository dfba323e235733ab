"""Recover envelope and oscillation together when only the mean is known.

Combines the snapshot division with the trace phase derivative, and checks
that the supplied leading trace really is compatible with the known mean
through the Volterra left side (the congruence condition).  A deliberately
corrupted trace trips the check.
"""

import math

from osckit import (
    FastProfile,
    SineSeries,
    SlowFunction,
    SnapshotObservation,
    TraceObservation,
    recover_space_factor_and_oscillation,
)

mean = SlowFunction.monomial(1.0, 1)
snapshot = SnapshotObservation(1.0, SineSeries({
    1: math.exp(-1.0), 2: (3.0 + math.exp(-4.0)) / 16.0}))
phi0 = SlowFunction([(1.0, 0, -1.0), (1.0, 1, 0.0), (-1.0, 0, 0.0)])
phi2 = FastProfile([(1, -1.0, 0.0)])
trace_obs = TraceObservation(math.pi / 2.0, phi0, phi2, horizon=2.0)

rec = recover_space_factor_and_oscillation(snapshot, trace_obs, mean, n_max=8)
print("envelope coefficients:",
      {n: round(rec.envelope.coefficient(n)(0.0), 12) for n in rec.envelope.modes})
print("oscillation:", rec.oscillation.harmonics)
print(f"congruence residual {rec.congruence.residual_sup:.2e} "
      f"(tolerance {rec.congruence.tolerance:.2e}) -> "
      f"consistent = {rec.congruence.consistent}")

# corrupt the leading trace: residual reflects the perturbation's derivative
corrupted = TraceObservation(math.pi / 2.0,
                             phi0 + SlowFunction.monomial(1e-3, 2),
                             phi2, horizon=2.0)
bad = recover_space_factor_and_oscillation(snapshot, corrupted, mean, n_max=8)
print(f"\nwith a 1e-3 t^2 corruption: residual {bad.congruence.residual_sup:.2e} "
      f"-> consistent = {bad.congruence.consistent}")
