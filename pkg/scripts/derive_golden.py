#!/usr/bin/env python3
"""Regenerate the frozen numeric literals used by the test suite.

Everything here is computed from scratch in 50-digit mpmath arithmetic,
restating the formulas rather than importing the package, so the printed
values are an independent cross-check of the float implementation:

* binary entropy and four-outcome entropy spot values;
* one-way key rates at the channels the tests probe;
* exact algebraic thresholds (symmetric two-way limit, single-basis and
  separate-accounting zero-rate points);
* crossing points where the one-rejection two-way rate first overtakes
  the one-way rate on the q_x0 = q_z0 family, for each small-q_y0 case.

Run ``python scripts/derive_golden.py`` and paste the printed literals
into the tests when a constant legitimately needs to change.  Values are
printed to 17 significant digits (full float precision).
"""

import mpmath as mp

mp.mp.dps = 50


def h2(t):
    t = mp.mpf(t)
    if t == 0 or t == 1:
        return mp.mpf(0)
    return -t * mp.log(t, 2) - (1 - t) * mp.log(1 - t, 2)


def shannon4(qs):
    total = mp.mpf(0)
    for q in qs:
        q = mp.mpf(q)
        if q > 0:
            total -= q * mp.log(q, 2)
    return total


def channel(q_x, q_y, q_z):
    q_x, q_y, q_z = mp.mpf(q_x), mp.mpf(q_y), mp.mpf(q_z)
    return (1 - q_x - q_y - q_z, q_x, q_y, q_z)


def rate_bb84_symmetrized(qs):
    _, q_x, q_y, q_z = qs
    p_x, p_z = q_x + q_y, q_z + q_y
    return 1 - 2 * h2((p_x + p_z) / 2)


def rate_single_basis(qs):
    _, q_x, q_y, q_z = qs
    return 1 - h2(q_x + q_y) - h2(q_z + q_y)


def averaged(qs):
    q_i, q_x, q_y, q_z = qs
    return (
        q_i,
        (q_x + 2 * q_z) / 3,
        (q_x + 2 * q_y) / 3,
        (q_x + q_y + q_z) / 3,
    )


def rate_sixstate_mixed(qs):
    return 1 - shannon4(averaged(qs))


def rate_sixstate_separate(qs):
    return 1 - shannon4(qs)


def conj_y(qs):
    q_i, q_x, q_y, q_z = qs
    return (q_i, q_z, q_x, q_y)


def b_step(qs):
    q_i, q_x, q_y, q_z = qs
    d = (q_i + q_z) ** 2 + (q_x + q_y) ** 2
    out = (
        (q_i**2 + q_z**2) / d,
        (q_x**2 + q_y**2) / d,
        2 * q_x * q_y / d,
        2 * q_i * q_z / d,
    )
    return out, d / 2


def rate_two_way_one_reject(qs):
    out, survival = b_step(conj_y(qs))
    return survival * (1 - shannon4(out))


def show(name, value):
    print(f"{name} = {mp.nstr(value, 17)}")


print("# entropy spot values")
show("H(0.05)", h2("0.05"))
show("H(0.06)", h2("0.06"))
show("H(0.10)", h2("0.10"))
show("H(0.12)", h2("0.12"))
show("shannon4(0.7,0.1,0.1,0.1)", shannon4(("0.7", "0.1", "0.1", "0.1")))

print()
print("# one-way rates at test channels")
show("rate_bb84_symmetrized(qx=0.10,qy=0,qz=0.02)",
     rate_bb84_symmetrized(channel("0.10", "0", "0.02")))
show("rate_single_basis(qx=0.10,qy=0,qz=0.02)",
     rate_single_basis(channel("0.10", "0", "0.02")))
show("rate_sixstate_separate(qx=0.10,qy=0,qz=0.05)",
     rate_sixstate_separate(channel("0.10", "0", "0.05")))
show("rate_sixstate_mixed(qx=0.10,qy=0,qz=0.05)",
     rate_sixstate_mixed(channel("0.10", "0", "0.05")))
show("rate_two_way_one_reject(noiseless)", rate_two_way_one_reject(channel(0, 0, 0)))

print()
print("# exact algebraic thresholds")
# Symmetric channel, unbounded two-way distillation: the limit criterion
# s < u and s*u < v^2 in the coordinates u = q_i + q_z, v = q_i - q_z,
# s = q_x + q_y reduces on q_x = q_y = q_z = Q/3 to 20Q^2 - 30Q + 9 > 0,
# whose smaller root is 3(5 - sqrt(5))/20.
Q = mp.findroot(
    lambda q: (2 * q / 3) * (1 - 2 * q / 3) - (1 - 4 * q / 3) ** 2,
    mp.mpf("0.41"),
)
show("two_way_limit_threshold_symmetric", Q)
show("  corresponding bit error (5-sqrt(5))/10", (5 - mp.sqrt(5)) / 10)
show("  closed form 3*(5-sqrt(5))/20", 3 * (5 - mp.sqrt(5)) / 20)

t_star = mp.findroot(lambda t: h2(t) - mp.mpf("0.5"), mp.mpf("0.11"))
show("single_basis_zero_symmetric (=2t*, H(t*)=1/2)", 2 * t_star)

Q_sep = mp.findroot(
    lambda q: shannon4(channel(q / 3, q / 3, q / 3)) - 1,
    mp.mpf("0.19"),
)
show("sixstate_separate_zero_symmetric", Q_sep)

print()
print("# fig-2 family: one-way zero and two-way crossing per q_y0 case")
for q_y0_s in ("0", "0.005", "0.01", "0.02"):
    q_y0 = mp.mpf(q_y0_s)

    def one_way(total):
        q_x0 = (total - q_y0) / 2
        return rate_sixstate_separate(channel(q_x0, q_y0, q_x0))

    def gap(total):
        q_x0 = (total - q_y0) / 2
        qs = channel(q_x0, q_y0, q_x0)
        return rate_two_way_one_reject(qs) - rate_sixstate_separate(qs)

    zero = mp.findroot(one_way, mp.mpf("0.22"))
    # The gap is negative at small noise and first turns positive well
    # below the one-way zero; bracket by scanning then bisect.
    lo, hi = None, None
    t = q_y0 + mp.mpf("0.01")
    prev = gap(t)
    while t < mp.mpf("0.45"):
        t += mp.mpf("0.005")
        cur = gap(t)
        if prev <= 0 < cur:
            lo, hi = t - mp.mpf("0.005"), t
            break
        prev = cur
    assert lo is not None, f"no crossing found for q_y0={q_y0_s}"
    for _ in range(200):
        mid = (lo + hi) / 2
        if gap(mid) > 0:
            hi = mid
        else:
            lo = mid
    show(f"one_way_zero[q_y0={q_y0_s}]", zero)
    show(f"crossing[q_y0={q_y0_s}]", (lo + hi) / 2)
