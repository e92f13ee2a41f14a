# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels: connected-component labeling and BFS distances.

Both operate on C-contiguous 2-D uint8 masks.  Labels follow raster order of
first appearance, starting at 1; background cells get 0.
"""
import numpy as np
from libc.stdlib cimport malloc, free


cdef inline Py_ssize_t _find(Py_ssize_t* parent, Py_ssize_t x) noexcept nogil:
    cdef Py_ssize_t root = x, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


cdef inline void _union(Py_ssize_t* parent, Py_ssize_t a, Py_ssize_t b) noexcept nogil:
    a = _find(parent, a)
    b = _find(parent, b)
    if a < b:
        parent[b] = a
    elif b < a:
        parent[a] = b


def label(const unsigned char[:, ::1] mask, int connectivity):
    """Label connected components of ``mask`` (connectivity 4 or 8).

    Works on horizontal runs: each run is united with the overlapping runs
    of the row above, then runs are painted with their root's label.
    Returns ``(labels, count)`` with ``labels`` an int32 array.
    """
    cdef Py_ssize_t h = mask.shape[0], w = mask.shape[1]
    labels_arr = np.zeros((h, w), dtype=np.int32)
    cdef int[:, ::1] labels = labels_arr
    if h == 0 or w == 0:
        return labels_arr, 0
    cdef Py_ssize_t cap = h * ((w + 1) // 2) + 1
    cdef Py_ssize_t* start = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* stop = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* row = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef Py_ssize_t* parent = <Py_ssize_t*> malloc(cap * sizeof(Py_ssize_t))
    cdef int* remap = <int*> malloc(cap * sizeof(int))
    cdef Py_ssize_t i, j, r, p, nruns = 0, prev_lo = 0, prev_hi = 0, cur_lo, root
    cdef Py_ssize_t d = 1 if connectivity == 8 else 0
    cdef int count = 0
    try:
        if start == NULL or stop == NULL or row == NULL or parent == NULL or remap == NULL:
            raise MemoryError()
        with nogil:
            for i in range(h):
                cur_lo = nruns
                j = 0
                while j < w:
                    if not mask[i, j]:
                        j += 1
                        continue
                    start[nruns] = j
                    while j < w and mask[i, j]:
                        j += 1
                    stop[nruns] = j
                    row[nruns] = i
                    parent[nruns] = nruns
                    nruns += 1
                # runs overlap (4) or touch diagonally (8) when the intervals,
                # widened by d, intersect
                p = prev_lo
                for r in range(cur_lo, nruns):
                    while p < prev_hi and stop[p] + d <= start[r]:
                        p += 1
                    while p < prev_hi and start[p] < stop[r] + d:
                        _union(parent, r, p)
                        if stop[p] + d > stop[r]:
                            break
                        p += 1
                prev_lo, prev_hi = cur_lo, nruns
            for r in range(nruns):
                root = _find(parent, r)
                if root == r:
                    count += 1
                    remap[r] = count
                for j in range(start[r], stop[r]):
                    labels[row[r], j] = remap[root]
    finally:
        free(start)
        free(stop)
        free(row)
        free(parent)
        free(remap)
    return labels_arr, count


def geodesic_distance(const unsigned char[:, ::1] sources,
                      const unsigned char[:, ::1] allowed,
                      int connectivity):
    """Multi-source BFS distance through ``allowed`` cells.

    Source cells have distance 0 whether or not they are allowed; cells that
    are not reachable get -1.
    """
    cdef Py_ssize_t h = sources.shape[0], w = sources.shape[1]
    cdef Py_ssize_t n = h * w, head = 0, tail = 0, idx, i, j, k, ni, nj
    dist_arr = np.full((h, w), -1, dtype=np.int32)
    cdef int[:, ::1] dist = dist_arr
    if n == 0:
        return dist_arr
    cdef Py_ssize_t* queue = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    if queue == NULL:
        raise MemoryError()
    cdef int di[8]
    cdef int dj[8]
    di[:] = [-1, 1, 0, 0, -1, -1, 1, 1]
    dj[:] = [0, 0, -1, 1, -1, 1, -1, 1]
    cdef int nnb = 8 if connectivity == 8 else 4
    try:
        with nogil:
            for i in range(h):
                for j in range(w):
                    if sources[i, j]:
                        dist[i, j] = 0
                        queue[tail] = i * w + j
                        tail += 1
            while head < tail:
                idx = queue[head]
                head += 1
                i = idx // w
                j = idx - i * w
                for k in range(nnb):
                    ni = i + di[k]
                    nj = j + dj[k]
                    if ni < 0 or ni >= h or nj < 0 or nj >= w:
                        continue
                    if dist[ni, nj] != -1 or not allowed[ni, nj]:
                        continue
                    dist[ni, nj] = dist[i, j] + 1
                    queue[tail] = ni * w + nj
                    tail += 1
    finally:
        free(queue)
    return dist_arr
