import random

from widecount.actions import Arrow, Groupoid, GroupoidAction, PermGroup, Permutation


def random_groupoid_action(rng: random.Random, max_carrier: int = 200) -> GroupoidAction:
    """A random finite groupoid action: several objects, isomorphic fibers,
    vertex groups from a small pool, connecting arrows everywhere."""
    n_obj = rng.randint(1, 5)
    base = rng.choice(
        [PermGroup.trivial(3), PermGroup.cyclic(2), PermGroup.cyclic(3), PermGroup.symmetric(3)]
    )
    fiber_size = base.degree * rng.randint(0, max(1, max_carrier // (n_obj * base.degree)))
    tokens = list(range(fiber_size))

    def act_token(g: Permutation, t: int) -> int:
        r = t % base.degree + 1
        return (t - (r - 1)) + (g(r) - 1)

    objects = [f"q{i}" for i in range(n_obj)]
    arrow_of = {}
    arrows = []
    for i in objects:
        for j in objects:
            for g in base:
                a = Arrow(i, j, (g.images,))
                arrow_of[(i, j, g)] = a
                arrows.append(a)
    compose = {}
    for i in objects:
        for j in objects:
            for k in objects:
                for g in base:
                    for h in base:
                        compose[(arrow_of[(i, j, g)], arrow_of[(j, k, h)])] = arrow_of[
                            (i, k, h * g)
                        ]
    identities = {i: arrow_of[(i, i, Permutation.identity(base.degree))] for i in objects}
    gpd = Groupoid(objects, arrows, compose, identities)
    carrier = [(i, t) for i in objects for t in tokens]
    anchor = {x: x[0] for x in carrier}
    maps = {
        a: {(i, t): (j, act_token(g, t)) for t in tokens}
        for (i, j, g), a in arrow_of.items()
    }
    return GroupoidAction(gpd, carrier, anchor, maps)
