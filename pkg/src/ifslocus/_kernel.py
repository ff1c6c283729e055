"""Jitted inner loop of the level expansion.

One call expands a whole frontier level in candidate order: for each node,
digits ascending, apply the vertical pre-test, the slanted test, the trap
test, then insert.  Strict IEEE float semantics (no fastmath) keep results
bit-identical across runs and processes.

Return contract (m, i, j, code):
  code 0: level completed, m children stored;
  code 1: trap hit while generating child (node i, digit j), m stored so far;
  code 2: node cap reached at the m-th insertion (node i, digit j last stored).
"""

from __future__ import annotations

from numba import njit


@njit(cache=True)
def expand_level(
    s,
    v,
    digits,
    rho,
    y,
    shear,
    v_hat,
    s_hat,
    in_lens,
    s_trap,
    v_trap,
    out_s,
    out_v,
    out_parent,
    out_col,
    cap,
):
    m = 0
    for i in range(s.size):
        base = rho * s[i]
        rv = rho * v[i]
        for j in range(digits.size):
            vp = base - y * digits[j]
            if abs(vp) > v_hat:
                continue
            sp = shear * vp - rv
            if abs(sp) > s_hat:
                continue
            if in_lens and abs(sp) < s_trap and abs(vp) < v_trap:
                return m, i, j, 1
            out_s[m] = sp
            out_v[m] = vp
            out_parent[m] = i
            out_col[m] = j
            m += 1
            if m >= cap:
                return m, i, j, 2
    return m, -1, -1, 0
