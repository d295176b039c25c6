#!/usr/bin/env python3
"""Writes the train/test instances of the bundled benchmarks.

Usage: gen_instances.py [benchmarks-dir]
"""
import os
import sys


def problem(name, domain, objects, init):
    lines = [f"(define (problem {name})", f"  (:domain {domain})", "  (:objects"]
    for typ, objs in objects:
        suffix = f" - {typ}" if typ else ""
        lines.append("    " + " ".join(objs) + suffix)
    lines.append("  )")
    lines.append("  (:init")
    for atom in init:
        lines.append("    (" + " ".join(atom) + ")")
    lines.append("  )")
    lines.append("  (:goal (and)))")
    return "\n".join(lines) + "\n"


def gripper(balls, rooms=2, grippers=3):
    R = [f"room{i}" for i in range(1, rooms + 1)]
    B = [f"ball{i}" for i in range(1, balls + 1)]
    G = [f"g{i}" for i in range(1, grippers + 1)]
    init = [("room", r) for r in R] + [("ball", b) for b in B] + [("gripper", g) for g in G]
    init += [("at-robby", R[0])] + [("at", b, R[0]) for b in B] + [("free", g) for g in G]
    return [("room", R), ("ball", B), ("gripper", G)], init


def blocks3(n):
    X = [f"b{i}" for i in range(1, n + 1)]
    init = [("neq", a, b) for a in X for b in X if a != b]
    init += [("ontable", b) for b in X] + [("clear", b) for b in X]
    return [(None, X)], init


def blocks4(n):
    X = [f"b{i}" for i in range(1, n + 1)]
    init = [("ontable", b) for b in X] + [("clear", b) for b in X] + [("handempty",)]
    return [(None, X)], init


def hanoi(n):
    P = ["peg1", "peg2", "peg3"]
    D = [f"d{i}" for i in range(1, n + 1)]
    init = [("smaller", D[i], D[j]) for i in range(n) for j in range(i + 1, n)]
    init += [("smaller", d, p) for d in D for p in P]
    init += [("on", D[-1], P[0])] + [("on", D[i], D[i + 1]) for i in range(n - 1)]
    init += [("clear", D[0]), ("clear", P[1]), ("clear", P[2])]
    return [(None, P + D)], init


def grid_cells(w, h):
    return [[f"c{x}{y}" for y in range(1, h + 1)] for x in range(1, w + 1)]


def grid_adjacency(cells):
    w, h = len(cells), len(cells[0])
    pairs = []
    for x in range(w):
        for y in range(h):
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                nx, ny = x + dx, y + dy
                if 0 <= nx < w and 0 <= ny < h:
                    pairs.append((cells[x][y], cells[nx][ny]))
    return pairs


def delivery(packages, trucks=2, w=3, h=3):
    cells = grid_cells(w, h)
    C = [c for col in cells for c in col]
    T = [f"t{i}" for i in range(1, trucks + 1)]
    O = [f"o{i}" for i in range(1, packages + 1)]
    init = [("adjacent", a, b) for a, b in grid_adjacency(cells)]
    init += [("truck", t) for t in T] + [("package", o) for o in O]
    init += [("at", t, C[0]) for t in T] + [("empty", t) for t in T]
    init += [("at", o, C[-1 - i]) for i, o in enumerate(O)]
    return [("truck", T), ("package", O), ("cell", C)], init


def ferry(cars, locs):
    L = [f"l{i}" for i in range(1, locs + 1)]
    Cs = [f"car{i}" for i in range(1, cars + 1)]
    init = [("location", l) for l in L] + [("car", c) for c in Cs]
    init += [("at-ferry", L[0]), ("empty-ferry",)]
    init += [("at", c, L[i % locs]) for i, c in enumerate(Cs)]
    return [("car", Cs), ("location", L)], init


def miconic(floors, persons):
    F = [f"f{i}" for i in range(1, floors + 1)]
    P = [f"p{i}" for i in range(1, persons + 1)]
    init = [("next", F[i], F[i + 1]) for i in range(floors - 1)]
    init += [("lift-at", F[0])] + [("at", p, F[(i + 1) % floors]) for i, p in enumerate(P)]
    return [("floor", F), ("passenger", P)], init


def driverlog(roads, paths, drivers, trucks, packages, road_links, path_links):
    """`roads` locations carry truck links; `paths` extra locations are reachable on foot only."""
    L = [f"s{i}" for i in range(1, roads + 1)] + [f"p{i}" for i in range(1, paths + 1)]
    D = [f"driver{i}" for i in range(1, drivers + 1)]
    K = [f"truck{i}" for i in range(1, trucks + 1)]
    P = [f"package{i}" for i in range(1, packages + 1)]
    init = [("driver", d) for d in D] + [("truck", k) for k in K] + [("package", p) for p in P]
    for a, b in road_links:
        init += [("link", L[a], L[b]), ("link", L[b], L[a])]
    for a, b in path_links:
        init += [("path", L[a], L[b]), ("path", L[b], L[a])]
    init += [("at", d, L[i % roads]) for i, d in enumerate(D)]
    init += [("at", k, L[i % roads]) for i, k in enumerate(K)] + [("empty", k) for k in K]
    init += [("at", p, L[(i + 1) % roads]) for i, p in enumerate(P)]
    return [("driver", D), ("truck", K), ("package", P), ("location", L)], init


def logistics(city_sizes, trucks_per_city, planes, packages):
    Cs = [f"city{i}" for i in range(1, len(city_sizes) + 1)]
    L, init, V, trucks = [], [], [], []
    for ci, size in enumerate(city_sizes):
        locs = [f"l{ci + 1}{j}" for j in range(1, size + 1)]
        L += locs
        init += [("in-city", l, Cs[ci]) for l in locs] + [("airport", locs[0])]
        for t in range(trucks_per_city[ci]):
            name = f"truck{len(trucks) + 1}"
            trucks.append(name)
            init += [("vehicle", name), ("truck", name), ("at", name, locs[t % size])]
    airports = [f"l{ci + 1}1" for ci in range(len(city_sizes))]
    A = [f"plane{i}" for i in range(1, planes + 1)]
    init += [("vehicle", a) for a in A] + [("airplane", a) for a in A] + [("at", a, airports[i % len(airports)]) for i, a in enumerate(A)]
    P = [f"package{i}" for i in range(1, packages + 1)]
    init += [("package", p) for p in P] + [("at", p, L[-1 - i]) for i, p in enumerate(P)]
    V = trucks + A
    return [("package", P), ("vehicle", V), ("location", L), ("city", Cs)], init


def grid(w, h, keys, locks, robot, key_shapes, lock_shapes):
    """keys: list of (key, cell); locks: list of cells; shapes given per key and lock."""
    cells = grid_cells(w, h)
    C = [c for col in cells for c in col]
    K = [k for k, _ in keys]
    S = sorted(set(key_shapes.values()) | set(lock_shapes.values()))
    init = [("conn", a, b) for a, b in grid_adjacency(cells)]
    init += [("key-shape", k, key_shapes[k]) for k in K]
    init += [("lock-shape", c, lock_shapes[c]) for c in locks]
    init += [("at", k, c) for k, c in keys] + [("at-robot", robot), ("arm-empty",)]
    init += [("locked", c) for c in locks] + [("open", c) for c in C if c not in locks]
    return [("place", C), ("key", K), ("shape", S)], init


def sokoban(w, h, robot, boxes):
    cells = grid_cells(w, h)
    C = [c for col in cells for c in col]
    init = [("adj", a, b) for a, b in grid_adjacency(cells)]
    for x in range(w):
        for y in range(h):
            for dx, dy in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                x2, y2, x3, y3 = x + dx, y + dy, x + 2 * dx, y + 2 * dy
                if 0 <= x3 < w and 0 <= y3 < h:
                    init.append(("inline", cells[x][y], cells[x2][y2], cells[x3][y3]))
    init += [("at-robot", robot)] + [("box", b) for b in boxes]
    return [(None, C)], init


def npuzzle(n):
    X = [f"x{i}" for i in range(1, n + 1)]
    Y = [f"y{i}" for i in range(1, n + 1)]
    T = [f"t{i}" for i in range(1, n * n)]
    init = [("succ-col", X[i], X[i + 1]) for i in range(n - 1)]
    init += [("succ-row", Y[i], Y[i + 1]) for i in range(n - 1)]
    # Solved position with the blank in the last cell.
    for i, t in enumerate(T):
        init.append(("at", t, X[i % n], Y[i // n]))
    init.append(("blank", X[-1], Y[-1]))
    return [("tile", T), ("column", X), ("row", Y)], init


GRID_TRAIN = dict(
    w=3, h=3, robot="c21",
    keys=[("k1", "c21"), ("k2", "c13"), ("k3", "c21")],
    locks=["c11", "c12", "c23"],
    key_shapes={"k1": "square", "k2": "circle", "k3": "circle"},
    lock_shapes={"c11": "square", "c12": "square", "c23": "circle"},
)
GRID_TEST = dict(
    w=3, h=4, robot="c11",
    keys=[("k1", "c11"), ("k2", "c14"), ("k3", "c31"), ("k4", "c34")],
    locks=["c12", "c21", "c22", "c23", "c32", "c33"],
    key_shapes={"k1": "square", "k2": "circle", "k3": "square", "k4": "circle"},
    lock_shapes={"c12": "square", "c21": "circle", "c22": "square", "c23": "circle", "c32": "square", "c33": "circle"},
)

DRIVERLOG_TRAIN = dict(roads=3, paths=2, drivers=2, trucks=2, packages=2,
                       road_links=[(0, 1), (1, 2), (0, 2)], path_links=[(0, 3), (3, 1), (1, 4), (4, 2)])
DRIVERLOG_TEST = dict(roads=4, paths=3, drivers=2, trucks=2, packages=3,
                      road_links=[(0, 1), (1, 2), (2, 3), (0, 3)],
                      path_links=[(0, 4), (4, 1), (1, 5), (5, 2), (2, 6), (6, 3)])

SOKOBAN_TRAIN = dict(w=4, h=4, robot="c11", boxes=["c13", "c22", "c31", "c33"])
SOKOBAN_TEST = dict(w=5, h=5, robot="c11", boxes=["c23", "c32", "c34"])

BENCHMARKS = {
    "blocks3": (lambda: blocks3(6), lambda: blocks3(7)),
    "blocks4": (lambda: blocks4(7), lambda: blocks4(8)),
    "delivery": (lambda: delivery(2), lambda: delivery(3)),
    "driverlog": (lambda: driverlog(**DRIVERLOG_TRAIN), lambda: driverlog(**DRIVERLOG_TEST)),
    "ferry": (lambda: ferry(5, 5), lambda: ferry(6, 5)),
    "grid": (lambda: grid(**GRID_TRAIN), lambda: grid(**GRID_TEST)),
    "grid_lock": (lambda: grid(**GRID_TRAIN), lambda: grid(**GRID_TEST)),
    "gripper": (lambda: gripper(7), lambda: gripper(8)),
    "hanoi": (lambda: hanoi(9), lambda: hanoi(10)),
    "logistics": (lambda: logistics([3, 2, 2], [2, 1, 1], 2, 2), lambda: logistics([3, 3, 3], [1, 1, 1], 2, 2)),
    "miconic": (lambda: miconic(5, 5), lambda: miconic(6, 6)),
    "npuzzle": (lambda: npuzzle(3), lambda: npuzzle(4)),
    "sokoban": (lambda: sokoban(**SOKOBAN_TRAIN), lambda: sokoban(**SOKOBAN_TEST)),
    "sokoban_pull": (lambda: sokoban(**SOKOBAN_TRAIN), lambda: sokoban(**SOKOBAN_TEST)),
}


def main():
    root = sys.argv[1] if len(sys.argv) > 1 else os.path.join(os.path.dirname(__file__), "..", "benchmarks")
    for name, (train, test) in BENCHMARKS.items():
        for split, make in (("train", train), ("test", test)):
            objects, init = make()
            text = problem(f"{name}-{split}", name, objects, init)
            with open(os.path.join(root, name, f"{split}.pddl"), "w") as f:
                f.write(text)


if __name__ == "__main__":
    main()
