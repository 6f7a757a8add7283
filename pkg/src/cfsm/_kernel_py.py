"""Reference (pure Python) exploration kernel.

Works on an integer encoding of a system:

``trans[i][s]``
    tuple of ``(is_recv, letter, target)`` for peer ``i`` in state ``s``;
``letter_buf[a]``
    buffer slot written by a send of ``a`` and read by its receive;
``letter_dst[a]``
    receiving peer of ``a`` (0-based).

A configuration is the flat tuple ``(s_0, ..., s_{n-1}, buf_0, ...)`` with
each buffer a tuple of letter ids (kept sorted for bags).  ``bound == 0``
selects rendezvous steps.  Edge kinds: 0 send, 1 receive, 2 rendezvous.

Must stay behaviourally identical to ``_kernel.pyx``.
"""

SEND, RECV, SYNC = 0, 1, 2


def explore(trans, initial, letter_buf, letter_dst, nbuf, bag, bound, max_states):
    npeers = len(trans)
    start = tuple(initial) + ((),) * nbuf
    index = {start: 0}
    configs = [start]
    edges = []
    head = 0
    while head < len(configs):
        conf = configs[head]
        src = head
        head += 1
        for i in range(npeers):
            for is_recv, a, t in trans[i][conf[i]]:
                if bound == 0:
                    if is_recv:
                        continue
                    j = letter_dst[a]
                    for r2, a2, t2 in trans[j][conf[j]]:
                        if not r2 or a2 != a:
                            continue
                        new = list(conf)
                        new[i] = t
                        new[j] = t2
                        _link(tuple(new), src, SYNC, a, index, configs, edges, max_states)
                    continue
                b = npeers + letter_buf[a]
                buf = conf[b]
                if is_recv:
                    if bag:
                        if a not in buf:
                            continue
                        k = buf.index(a)
                        nbuf_content = buf[:k] + buf[k + 1 :]
                    else:
                        if not buf or buf[0] != a:
                            continue
                        nbuf_content = buf[1:]
                    kind = RECV
                else:
                    if len(buf) >= bound:
                        continue
                    nbuf_content = tuple(sorted(buf + (a,))) if bag else buf + (a,)
                    kind = SEND
                new = list(conf)
                new[i] = t
                new[b] = nbuf_content
                _link(tuple(new), src, kind, a, index, configs, edges, max_states)
    return configs, edges


def _link(new, src, kind, a, index, configs, edges, max_states):
    dst = index.get(new)
    if dst is None:
        if len(configs) >= max_states:
            raise OverflowError(f"state ceiling of {max_states} exceeded")
        dst = len(configs)
        index[new] = dst
        configs.append(new)
    edges.append((src, kind, a, dst))
