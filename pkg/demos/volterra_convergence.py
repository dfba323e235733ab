"""Product-trapezoidal Volterra marching and its observed order.

The trace equation of the reference two-mode source,

    l(t) - integral_0^t e^{-(t-s)} l(s) ds = 1 - e^-t,

has exact solution l(t) = t.  Halving the grid four times shows the
O(h^2) error and an observed order near 2; the separable-kernel
recurrence makes each solve O(M).
"""

from osckit import Kernel, SlowFunction, VolterraProblem, convergence_order

problem = VolterraProblem(
    diagonal=SlowFunction.constant(1.0),
    kernel=Kernel(((1, SlowFunction.constant(-1.0)),)),
    rhs=SlowFunction([(1.0, 0, 0.0), (-1.0, 0, -1.0)]),
    horizon=2.0,
)

report = convergence_order(problem, (256, 512, 1024, 2048), lambda t: t)

print("intervals   sup error     pairwise order")
for i, (m, err) in enumerate(zip(report.intervals, report.errors)):
    order = f"{report.pair_orders[i - 1]:.3f}" if i else "     "
    print(f"{m:9d}   {err:.4e}    {order}")
print(f"\nobserved order: {report.order:.3f}  "
      f"(monotone={report.monotone}, degenerate={report.degenerate})")
