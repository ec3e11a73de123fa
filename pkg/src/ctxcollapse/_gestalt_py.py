"""Pure-Python twin of the compiled gestalt matching kernel.

Kept behaviourally identical to ``_gestalt.pyx``: same recursion, same
tie-break (longest common substring, then smallest start in ``a``, then
smallest start in ``b``).
"""


def match_total(a: str, b: str) -> int:
    """Total characters matched by recursive longest-common-substring matching."""
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return 0

    total = 0
    stack = [(0, la, 0, lb)]
    while stack:
        alo, ahi, blo, bhi = stack.pop()
        if alo >= ahi or blo >= bhi:
            continue

        best_len = 0
        best_i = alo
        best_j = blo
        row = [0] * (bhi - blo + 1)
        for i in range(ahi - 1, alo - 1, -1):
            ai = a[i]
            for j in range(blo, bhi):
                cur = row[j - blo + 1] + 1 if ai == b[j] else 0
                row[j - blo] = cur
                if cur > best_len or (
                    cur == best_len
                    and cur > 0
                    and (i < best_i or (i == best_i and j < best_j))
                ):
                    best_len = cur
                    best_i = i
                    best_j = j
        if best_len == 0:
            continue
        total += best_len
        stack.append((alo, best_i, blo, best_j))
        stack.append((best_i + best_len, ahi, best_j + best_len, bhi))
    return total
