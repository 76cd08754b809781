"""Compiled inner loops shared by metrics and repair.

Direction index k runs N, E, S, W; all arrays are int64.
"""
import numpy as np
from numba import njit

BITS = np.array([8, 4, 2, 1], dtype=np.int64)
OPP = np.array([2, 1, 8, 4], dtype=np.int64)
DR = np.array([-1, 0, 1, 0], dtype=np.int64)
DC = np.array([0, 1, 0, -1], dtype=np.int64)


@njit(cache=True)
def graph_stats(g):
    """Return ``(nodes, edges, components, bridges, degree)`` of the road graph.

    Components come from an iterative DFS, bridges from the low-link pass of
    the same traversal, so both are linear in the grid size.
    """
    H, W = g.shape
    n = H * W
    degree = np.zeros((H, W), dtype=np.int64)
    disc = np.full(n, -1, dtype=np.int64)
    low = np.zeros(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    it = np.zeros(n, dtype=np.int64)
    stack = np.zeros(n, dtype=np.int64)

    nodes = 0
    edges = 0
    for r in range(H):
        for c in range(W):
            if g[r, c] == 0:
                continue
            nodes += 1
            for k in range(4):
                nr = r + DR[k]
                nc = c + DC[k]
                if 0 <= nr < H and 0 <= nc < W and (g[r, c] & BITS[k]) and (g[nr, nc] & OPP[k]):
                    degree[r, c] += 1
            edges += degree[r, c]
    edges //= 2

    timer = 0
    components = 0
    bridges = 0
    for s in range(n):
        if g[s // W, s % W] == 0 or disc[s] != -1:
            continue
        components += 1
        disc[s] = timer
        low[s] = timer
        timer += 1
        sp = 0
        stack[sp] = s
        sp += 1
        while sp > 0:
            v = stack[sp - 1]
            if it[v] < 4:
                k = it[v]
                it[v] += 1
                r = v // W
                c = v % W
                nr = r + DR[k]
                nc = c + DC[k]
                if not (0 <= nr < H and 0 <= nc < W):
                    continue
                if not ((g[r, c] & BITS[k]) and (g[nr, nc] & OPP[k])):
                    continue
                u = nr * W + nc
                if disc[u] == -1:
                    parent[u] = v
                    disc[u] = timer
                    low[u] = timer
                    timer += 1
                    stack[sp] = u
                    sp += 1
                elif u != parent[v]:
                    if disc[u] < low[v]:
                        low[v] = disc[u]
            else:
                sp -= 1
                p = parent[v]
                if p >= 0:
                    if low[v] < low[p]:
                        low[p] = low[v]
                    if low[v] > disc[p]:
                        bridges += 1
    return nodes, edges, components, bridges, degree


@njit(cache=True)
def repair_inplace(g, mask, max_iterations, keep_nonempty):
    """Iterative reciprocity/boundary repair. Mutates ``g`` and ``mask``.

    Returns ``(iterations_used, converged)``.
    """
    H, W = g.shape
    iterations = 0
    changes = True
    while changes and iterations < max_iterations:
        iterations += 1
        changes = False
        for r in range(H):
            for c in range(W):
                if not mask[r, c]:
                    continue
                for k in range(4):
                    bit = BITS[k]
                    nr = r + DR[k]
                    nc = c + DC[k]
                    if 0 <= nr < H and 0 <= nc < W:
                        opp = OPP[k]
                        mine = (g[r, c] & bit) != 0
                        theirs = (g[nr, nc] & opp) != 0
                        if mine == theirs:
                            continue
                        if mine:
                            g[nr, nc] |= opp
                        elif keep_nonempty and g[nr, nc] == opp:
                            # clearing would empty the neighbour; connect to it instead
                            g[r, c] |= bit
                        else:
                            g[nr, nc] &= ~opp
                        mask[nr, nc] = True
                        changes = True
                    elif g[r, c] & bit:
                        g[r, c] &= ~bit
                        changes = True
                        if keep_nonempty and g[r, c] == 0:
                            g[r, c] = _inward_bit(g, r, c)
    return iterations, not changes


@njit(cache=True)
def _inward_bit(g, r, c):
    """Lowest single in-grid connection for an emptied cell, preferring one
    that a neighbour already reciprocates; 0 when the cell has no neighbours."""
    H, W = g.shape
    fallback = 0
    for k in range(3, -1, -1):  # W, S, E, N: increasing code value
        nr = r + DR[k]
        nc = c + DC[k]
        if 0 <= nr < H and 0 <= nc < W:
            if g[nr, nc] & OPP[k]:
                return BITS[k]
            if fallback == 0:
                fallback = BITS[k]
    return fallback


@njit(cache=True)
def tile_stats(g):
    """Per-tile counts for one grid in a single pass.

    Returns ``(boundary_violations, crossing_score, crossing_pairs,
    turn_pairs, straight_score, crossings, nonempty)``.
    """
    H, W = g.shape
    deg = np.zeros((H, W), dtype=np.int64)
    turn = np.zeros((H, W), dtype=np.bool_)
    bv = 0
    crossings = 0
    nonempty = 0
    for r in range(H):
        for c in range(W):
            t = g[r, c]
            d = (t & 1) + ((t >> 1) & 1) + ((t >> 2) & 1) + ((t >> 3) & 1)
            deg[r, c] = d
            turn[r, c] = d == 2 and t != 5 and t != 10
            if t != 0:
                nonempty += 1
            if d >= 3:
                crossings += 1
    for c in range(W):
        bv += (g[0, c] >> 3) & 1
        bv += (g[H - 1, c] >> 1) & 1
    for r in range(H):
        bv += g[r, 0] & 1
        bv += (g[r, W - 1] >> 2) & 1

    score = 0
    pairs = 0
    turns = 0
    for r in range(H):
        for c in range(W):
            # east and south neighbours only, so each pair is seen once
            if c + 1 < W and (g[r, c] & 4) and (g[r, c + 1] & 1):
                if deg[r, c] >= 3 and deg[r, c + 1] >= 3:
                    pairs += 1
                    score += deg[r, c] + deg[r, c + 1]
                if turn[r, c] and turn[r, c + 1]:
                    turns += 1
            if r + 1 < H and (g[r, c] & 2) and (g[r + 1, c] & 8):
                if deg[r, c] >= 3 and deg[r + 1, c] >= 3:
                    pairs += 1
                    score += deg[r, c] + deg[r + 1, c]
                if turn[r, c] and turn[r + 1, c]:
                    turns += 1

    straight = 0
    for r in range(H):
        run = 0
        for c in range(W + 1):
            if c < W and g[r, c] == 5:
                run += 1
            else:
                straight += run * run
                run = 0
    for c in range(W):
        run = 0
        for r in range(H + 1):
            if r < H and g[r, c] == 10:
                run += 1
            else:
                straight += run * run
                run = 0
    return bv, score, pairs, turns, straight, crossings, nonempty
