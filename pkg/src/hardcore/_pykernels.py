"""Pure-Python twin of the compiled update loop, used when the extension is unavailable."""

from __future__ import annotations


def run_updates(state, nbr, sites, u, accept: float) -> None:
    rows = nbr.tolist()
    st = state.tolist()
    for s, x in zip(sites.tolist(), u.tolist()):
        if x < accept:
            st[s] = 0 if any(w >= 0 and st[w] for w in rows[s]) else 1
        else:
            st[s] = 0
    state[:] = st


def run_coupled(top, bottom, nbr, sites, u, accept: float) -> None:
    rows = nbr.tolist()
    a = top.tolist()
    b = bottom.tolist()
    for s, x in zip(sites.tolist(), u.tolist()):
        if x < accept:
            ws = [w for w in rows[s] if w >= 0]
            a[s] = 0 if any(a[w] for w in ws) else 1
            b[s] = 0 if any(b[w] for w in ws) else 1
        else:
            a[s] = 0
            b[s] = 0
    top[:] = a
    bottom[:] = b
