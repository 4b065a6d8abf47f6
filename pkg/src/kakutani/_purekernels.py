"""Reference implementations of the hot loops, on Python integers.

Signatures mirror ``_ckernels``.  Points are integer numerators over a
common denominator ``D``; these functions never overflow and therefore
also serve inputs too wide for the compiled int64 path.
"""


def scaled_endpoints(A, C, Q, D, T, count, depth=None):
    """Left endpoints (times D) of every word whose scaled width is >= T.

    ``A[s]`` and ``C[s]`` are the ratio and offset of symbol ``s`` times
    ``Q``.  A word's state is ``(L, W)`` = (left endpoint, length) times
    ``D``; appending ``s`` maps it to ``(L + W*C[s]/Q, W*A[s]/Q)``.  The
    divisions are exact because ``D`` is a large enough power of ``Q``.
    Output is in depth-first pre-order.
    """
    out = []
    if D < T:
        return out
    m = len(A)
    stack = [(0, D)]
    pop = stack.pop
    push = stack.append
    emit = out.append
    while stack:
        L, W = pop()
        emit(L)
        # reversed so the leftmost child is expanded first
        for s in range(m - 1, -1, -1):
            w = W * A[s] // Q
            if w >= T:
                push((L + W * C[s] // Q, w))
    if len(out) != count:
        raise RuntimeError(f"generated {len(out)} words, expected {count}")
    return out


def discrepancy_fast(nums, D):
    """``(extreme, star, scale)``: both discrepancies times ``scale = N*D``.

    ``nums`` must be strictly increasing numerators in ``[0, D)``.
    """
    N = len(nums)
    hi = lo = None
    star = 0
    for i, k in enumerate(nums, start=1):
        d = i * D - N * k
        if hi is None or d > hi:
            hi = d
        if lo is None or d < lo:
            lo = d
        s = d if d > D - d else D - d
        if s > star:
            star = s
    return D + hi - lo, star, N * D


def discrepancy_bruteforce(nums, D):
    """Same contract as :func:`discrepancy_fast`, by enumerating intervals.

    Endpoints range over the points together with 0 and 1; for every pair
    all four open/closed variants are scored.  Quadratic in ``N``.
    """
    N = len(nums)
    cands = sorted(set(nums) | {0, D})
    pts = set(nums)
    # below[j]: points strictly below cands[j]; upto[j]: points <= cands[j]
    below, upto = [], []
    c = 0
    for v in cands:
        below.append(c)
        if v in pts:
            c += 1
        upto.append(c)
    best = 0
    star = 0
    M = len(cands)
    for i in range(M):
        a = cands[i]
        bi, ui = below[i], upto[i]
        # degenerate closed interval [a, a]
        v = abs((ui - bi) * D)
        if v > best:
            best = v
        for j in range(i + 1, M):
            span = N * (cands[j] - a)
            bj, uj = below[j], upto[j]
            for cnt in (uj - bi, bj - bi, uj - ui, bj - ui):
                v = cnt * D - span
                if v < 0:
                    v = -v
                if v > best:
                    best = v
    for j in range(M):
        b = cands[j]
        for cnt in (below[j], upto[j]):
            v = cnt * D - N * b
            if v < 0:
                v = -v
            if v > star:
                star = v
    return best, star, N * D
