"""Independent brute-force oracles used to check the production engines.

Everything here enumerates explicitly: orbit segments by depth-first
search over image choices, pseudo-orbits by depth-first search over
slack-admissible transitions, and expansiveness survival by transitive
closure.  No memoized state sets, no layered graphs.
"""

from fractions import Fraction


def naive_shadowed(F, pts, eps):
    """Does some orbit segment stay strictly within eps of pts?"""
    space = F.space
    tubes = [frozenset(y for y in space.points if space.dist(y, x) < eps)
             for x in pts]
    if not tubes[0]:
        return False

    def extend(i, y):
        if i == len(pts):
            return True
        return any(extend(i + 1, z) for z in F.images[y] if z in tubes[i])

    return any(extend(1, y0) for y0 in tubes[0])


def naive_property(F, eps, delta, max_len):
    """Enumerate every delta-pseudo-orbit up to max_len; return None when
    all are shadowed, else the first unshadowed one found."""
    space = F.space
    slack = F.slack_table()
    allowed = {x: [y for y in space.points if slack[x][y] < delta]
               for x in space.points}

    def search(prefix):
        if not naive_shadowed(F, prefix, eps):
            return prefix
        if len(prefix) == max_len:
            return None
        for nxt in allowed[prefix[-1]]:
            bad = search(prefix + [nxt])
            if bad is not None:
                return bad
        return None

    for x in space.points:
        bad = search([x])
        if bad is not None:
            return bad
    return None


def reach_cycle_survivors(F, delta):
    """Product-graph nodes that can reach a cycle, via transitive closure."""
    space = F.space
    pts = space.points
    nodes = [(x, y) for x in pts for y in pts if space.dist(x, y) < delta]
    node_ix = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for (x, y), i in node_ix.items():
        for a in F.images[x]:
            for b in F.images[y]:
                j = node_ix.get((a, b))
                if j is not None:
                    reach[i][j] = True
    for k in range(n):
        rk = reach[k]
        for i in range(n):
            if reach[i][k]:
                ri = reach[i]
                for j in range(n):
                    if rk[j]:
                        ri[j] = True
    on_cycle = [i for i in range(n) if reach[i][i]]
    survivors = {nodes[i] for i in range(n)
                 if any(reach[i][j] or i == j for j in on_cycle)}
    return survivors


def naive_expansive(F, delta):
    return all(x == y for x, y in reach_cycle_survivors(F, delta))


def distance_candidates(space):
    """All positive pairwise distances (the thresholds where any strict
    comparison can change truth value)."""
    vals = set()
    for x in space.points:
        for y in space.points:
            d = space.dist(x, y)
            if d > 0:
                vals.add(d)
    return sorted(vals)


def slack_candidates(F):
    vals = {v for row in F.slack_table().values() for v in row.values() if v > 0}
    return sorted(vals)


def brute_modulus(F, eta):
    """Largest threshold from the distance candidates (plus a ceiling)
    that forces image gaps below eta; checked by full pair enumeration."""
    space = F.space
    pairs = [(space.dist(x, y), space.hausdorff(F.eval(x), F.eval(y)))
             for x in space.points for y in space.points]
    best = Fraction(0)
    for w in distance_candidates(space) + [Fraction(2)]:
        if all(gap < eta for d, gap in pairs if d < w):
            best = w
        else:
            break
    return best
