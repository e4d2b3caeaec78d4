"""Floyd-Rivest selection for beam pruning."""
from __future__ import annotations

import math


def _select(a: list, left: int, right: int, k: int) -> None:
    while right > left:
        if right - left > 600:
            # recurse on a sample to pull the k-th element near position k
            n = right - left + 1
            i = k - left + 1
            z = math.log(n)
            s = 0.5 * math.exp(2 * z / 3)
            sd = 0.5 * math.sqrt(z * s * (n - s) / n) * (1 if i - n / 2 >= 0 else -1)
            new_left = max(left, int(k - i * s / n + sd))
            new_right = min(right, int(k + (n - i) * s / n + sd))
            _select(a, new_left, new_right, k)
        t = a[k]
        i, j = left, right
        a[left], a[k] = a[k], a[left]
        if a[right] > t:
            a[right], a[left] = a[left], a[right]
        while i < j:
            a[i], a[j] = a[j], a[i]
            i += 1
            j -= 1
            while a[i] < t:
                i += 1
            while a[j] > t:
                j -= 1
        if a[left] == t:
            a[left], a[j] = a[j], a[left]
        else:
            j += 1
            a[j], a[right] = a[right], a[j]
        if j <= k:
            left = j + 1
        if k <= j:
            right = j - 1


def floyd_rivest_select(items: list, k: int) -> list:
    """Reorder ``items`` in place so ``items[k]`` is the k-th smallest.

    Afterwards everything before index k compares <= ``items[k]`` and
    everything after compares >=. Returns ``items``.
    """
    if not 0 <= k < len(items):
        raise IndexError(f"k={k} out of range for {len(items)} items")
    _select(items, 0, len(items) - 1, k)
    return items


def smallest_k(items: list, k: int) -> list:
    """The ``k`` smallest items (unordered), leaving ``items`` untouched."""
    if k <= 0:
        return []
    if k >= len(items):
        return list(items)
    work = list(items)
    floyd_rivest_select(work, k - 1)
    return work[:k]
