"""Optional numba-compiled inner loops.

Import never fails: when numba is unavailable the module exposes
resample_pass = None and callers fall back to the vectorized numpy path,
which consumes the identical random stream.
"""

from __future__ import annotations

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None

if njit is not None:

    @njit(cache=True)
    def resample_pass(members, consistent, coins, inv_gamma, draws, cumw, delta):
        """One positional sweep over the sample.

        Consistent members stay. Each inconsistent member consumes one coin;
        survivors stay, failures consume one draw and are replaced by the
        vertex the draw selects on the cumulative weight scale (binary search
        equals searchsorted side='right', clipped to the last vertex).
        Vertex count changes accumulate into delta. Returns draws consumed.
        """
        j = 0
        k = 0
        total = cumw[-1]
        nv = cumw.size
        for i in range(members.size):
            m = members[i]
            if consistent[m]:
                continue
            c = coins[j]
            j += 1
            if c < inv_gamma:
                continue
            u = draws[k] * total
            k += 1
            lo = 0
            hi = nv
            while lo < hi:
                mid = (lo + hi) >> 1
                if u < cumw[mid]:
                    hi = mid
                else:
                    lo = mid + 1
            if lo >= nv:
                lo = nv - 1
            delta[m] -= 1
            delta[lo] += 1
            members[i] = lo
        return k

else:  # pragma: no cover
    resample_pass = None
