"""Recovering polynomial relations from truncated power series.

A series f(t) known to order N is called algebraic here when some nonzero
P(f, t) with f-degree <= q and t-degree <= k vanishes modulo t^(N+1).
The search walks (q, k) from small to large and solves an exact linear
system at each step, so the first hit is minimal within the bounds.
The order N must leave room: (q+1)(k+1) unknowns need more equations
than that, plus a safety margin.

Run:  python demos/02_series_annihilators.py
"""

from cralg import find_annihilator
from cralg.core.polynomial import MultiPolynomial, VariableTable
from cralg.engine.annihilator import required_order
from cralg.errors import OrderInsufficientError

N = 32
T = VariableTable.from_names(["t"], with_partners=False)
t = MultiPolynomial.variable("t", T).truncate(N)
one = MultiPolynomial.constant(1, T).truncate(N)

examples = {
    "sqrt(1 + t)": (one + t).power("1/2"),
    "(1 + t)^(1/3)": (one + t).power("1/3"),
    "1/(1 - t)^2": (one - t).power(-2),
    "t/(1 + t^2)": t * (one + t * t).power(-1),
    "exp(t)": t.exp(),
}

for name, f in examples.items():
    res = find_annihilator(f, qmax=3, kmax=3)
    if res:
        print(f"{name:>14}:  P = {res.poly}    (q, k) = {res.degrees}, kernel dimension {res.kernel_dim}")
    else:
        tried = ", ".join(f"({s['q']},{s['k']})" for s in res.searched)
        print(f"{name:>14}:  no annihilator within q, k <= 3; tried {tried}")

# Every candidate up to the answer must fit in the available order.  For
# sqrt(1 + t) the answer is (q, k) = (2, 1), so N = required_order(2, 1) is
# the shortest series that still certifies it.
sqrt = (one + t).power("1/2")
need = required_order(2, 1)
print(f"\nsqrt(1 + t) at order {need}: {find_annihilator(sqrt.truncate(need)).poly}")
try:
    find_annihilator(sqrt.truncate(6))
except OrderInsufficientError as exc:
    print(f"sqrt(1 + t) at order 6: {exc}")
