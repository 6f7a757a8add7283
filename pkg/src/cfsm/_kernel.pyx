# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled exploration kernel; mirrors ``_kernel_py.explore`` exactly."""

cdef enum:
    SEND = 0
    RECV = 1
    SYNC = 2


cdef inline Py_ssize_t _link(tuple new, Py_ssize_t src, int kind, int a, dict index,
                             list configs, list edges, Py_ssize_t max_states) except -1:
    cdef object found = index.get(new)
    cdef Py_ssize_t dst
    if found is None:
        if len(configs) >= max_states:
            raise OverflowError(f"state ceiling of {max_states} exceeded")
        dst = len(configs)
        index[new] = dst
        configs.append(new)
    else:
        dst = <Py_ssize_t>found
    edges.append((src, kind, a, dst))
    return dst


def explore(trans, initial, letter_buf, letter_dst, Py_ssize_t nbuf, bint bag, int bound,
            Py_ssize_t max_states):
    cdef Py_ssize_t npeers = len(trans)
    cdef list ltrans = [[tuple(row) for row in peer] for peer in trans]
    cdef list lbuf = list(letter_buf)
    cdef list ldst = list(letter_dst)
    cdef tuple start = tuple(initial) + ((),) * nbuf
    cdef dict index = {start: 0}
    cdef list configs = [start]
    cdef list edges = []
    cdef Py_ssize_t head = 0, src, i, j, b, k
    cdef int is_recv, a, t, r2, a2, t2, kind
    cdef tuple conf, buf, nbuf_content, row, row2
    cdef list new
    while head < len(configs):
        conf = <tuple>configs[head]
        src = head
        head += 1
        for i in range(npeers):
            row = <tuple>(<list>ltrans[i])[<Py_ssize_t>conf[i]]
            for item in row:
                is_recv, a, t = item
                if bound == 0:
                    if is_recv:
                        continue
                    j = <Py_ssize_t>ldst[a]
                    row2 = <tuple>(<list>ltrans[j])[<Py_ssize_t>conf[j]]
                    for item2 in row2:
                        r2, a2, t2 = item2
                        if not r2 or a2 != a:
                            continue
                        new = list(conf)
                        new[i] = t
                        new[j] = t2
                        _link(tuple(new), src, SYNC, a, index, configs, edges, max_states)
                    continue
                b = npeers + <Py_ssize_t>lbuf[a]
                buf = <tuple>conf[b]
                if is_recv:
                    if bag:
                        if a not in buf:
                            continue
                        k = buf.index(a)
                        nbuf_content = buf[:k] + buf[k + 1:]
                    else:
                        if len(buf) == 0 or buf[0] != a:
                            continue
                        nbuf_content = buf[1:]
                    kind = RECV
                else:
                    if len(buf) >= bound:
                        continue
                    if bag:
                        nbuf_content = tuple(sorted(buf + (a,)))
                    else:
                        nbuf_content = buf + (a,)
                    kind = SEND
                new = list(conf)
                new[i] = t
                new[b] = nbuf_content
                _link(tuple(new), src, kind, a, index, configs, edges, max_states)
    return configs, edges
