"""Pure-Python reference implementation of the integer Weyl-group kernels.

Must stay call-compatible with ``_ckernels.pyx``.  Arguments are plain
tuples/lists of ints; ``nodes`` is a sequence of 0-based node indices over
which reflections (and dominance) are taken.
"""


def reflect_dominant(labels, cartan, nodes):
    """Reflect ``labels`` into the dominant chamber of the nodes' Weyl group.

    Uses the first negative label at every step, so the returned count is the
    length of the Weyl element.  Returns ``(dominant_labels, count)``.
    """
    v = list(labels)
    n = len(v)
    count = 0
    while True:
        for i in nodes:
            if v[i] < 0:
                break
        else:
            return tuple(v), count
        c = v[i]
        for j in range(n):
            v[j] -= c * cartan[j][i]
        count += 1


def freudenthal_dominant(highest, cartan, gram, roots, heights, nodes):
    """Dominant weights of the irreducible module and their multiplicities.

    ``gram`` is an integer (scaled) form on labels, ``roots`` the positive roots
    (label coordinates) supported on ``nodes`` with their heights.  Labels are
    shifted by rho = (1, ..., 1), valid for any Levi since rho - rho_L is
    orthogonal to the Levi roots.
    """
    n = len(highest)
    lam = tuple(highest)

    def ip(x, y):
        s = 0
        for i in range(n):
            xi = x[i]
            if xi:
                row = gram[i]
                for j in range(n):
                    s += xi * row[j] * y[j]
        return s

    level = {lam: 0}
    frontier = [lam]
    while frontier:
        nxt = []
        for mu in frontier:
            lv = level[mu]
            for a, h in zip(roots, heights):
                nu = tuple(m - x for m, x in zip(mu, a))
                if nu in level:
                    continue
                if any(nu[i] < 0 for i in nodes):
                    continue
                level[nu] = lv + h
                nxt.append(nu)
        frontier = nxt

    shifted = tuple(x + 1 for x in lam)
    top = ip(shifted, shifted)
    mult = {lam: 1}
    for mu in sorted(level, key=level.__getitem__):
        if mu == lam:
            continue
        total = 0
        for a in roots:
            nu = tuple(m + x for m, x in zip(mu, a))
            while True:
                dom, _ = reflect_dominant(nu, cartan, nodes)
                m = mult.get(dom)
                if m is None:
                    break
                total += m * ip(nu, a)
                nu = tuple(m_ + x for m_, x in zip(nu, a))
        ms = tuple(x + 1 for x in mu)
        denom = top - ip(ms, ms)
        q, r = divmod(2 * total, denom)
        if r:
            raise ArithmeticError("Freudenthal recursion produced a non-integer multiplicity")
        mult[mu] = q
    return mult
