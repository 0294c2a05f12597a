import itertools
import unittest

import numpy as np

from szm.engine.scp import (CallGraph, SCEntry, check_well_founded, compose, edge_matrix,
                            format_matrix, has_strict_diagonal, identity, is_idempotent, saturate,
                            sc_matrix)
from szm.syntax.ordinals import INF, OVar, PosCtx, Succ, fresh_witness

U, L, S = SCEntry.UNKNOWN, SCEntry.LEQ, SCEntry.LESS


def naive_compose(m1, m2):
    rows, inner = m1.shape
    cols = m2.shape[1]
    result = np.zeros((rows, cols), dtype=np.int8)
    for i in range(rows):
        for k in range(cols):
            best = U
            for j in range(inner):
                if m1[i, j] == U or m2[j, k] == U:
                    continue
                best = max(best, max(m1[i, j], m2[j, k]))
            result[i, k] = best
    return result


def all_matrices(rows, cols):
    for entries in itertools.product([U, L, S], repeat=rows * cols):
        yield np.array(entries, dtype=np.int8).reshape((rows, cols))


def _threads(m):
    """
    Threads of one edge: (source parameter, target parameter, strict).
    """
    rows, cols = m.shape
    return frozenset((x, y, m[x, y] == S) for x in range(rows) for y in range(cols)
                     if m[x, y] != U)


def _extend(threads, m):
    """
    Threads of a path followed by one more edge, keeping only the strict copy of a pair
    reached both ways.
    """
    found = {}
    for x, y, strict in threads:
        for z in range(m.shape[1]):
            if m[y, z] != U:
                found[x, z] = found.get((x, z), False) or strict or m[y, z] == S
    return frozenset((x, z, strict) for (x, z), strict in found.items())


def _descends_forever(threads):
    """
    Tells whether repeating a loop forever leaves a thread that decreases infinitely often:
    some strict step of the loop starts a chain of threads leading back to its source.
    """
    steps = {}
    for x, y, _ in threads:
        steps.setdefault(x, set()).add(y)
    for x, y, strict in threads:
        if not strict:
            continue
        reached, todo = {y}, [y]
        while todo:
            for z in steps.get(todo.pop(), ()):
                if z not in reached:
                    reached.add(z)
                    todo.append(z)
        if x in reached:
            return True
    return False


def descent_oracle(arities, edges):
    """
    Walks every path of the graph, tracking its threads, and requires each closed walk to have
    an infinitely decreasing thread when repeated forever.
    """
    todo = [(src, dst, _threads(m)) for src, dst, m in edges]
    seen = set()
    while todo:
        state = todo.pop()
        if state in seen:
            continue
        seen.add(state)
        start, end, threads = state
        if start == end and not _descends_forever(threads):
            return False
        for src, dst, m in edges:
            if src == end:
                todo.append((start, dst, _extend(threads, m)))
    return True


class Test_Matrices(unittest.TestCase):
    def test_compose_combination(self):
        self.assertEqual(compose(sc_matrix([[L]]), sc_matrix([[S]]))[0, 0], S)
        self.assertEqual(compose(sc_matrix([[L]]), sc_matrix([[L]]))[0, 0], L)
        self.assertEqual(compose(sc_matrix([[S]]), sc_matrix([[U]]))[0, 0], U)
        m = compose(sc_matrix([[U, L]]), sc_matrix([[S], [S]]))
        self.assertEqual(m.shape, (1, 1))
        self.assertEqual(m[0, 0], S)

    def test_compose_empty(self):
        m = compose(np.zeros((2, 0), dtype=np.int8), np.zeros((0, 3), dtype=np.int8))
        self.assertEqual(m.shape, (2, 3))
        self.assertTrue(np.all(m == U))

    def test_compose_shape_mismatch(self):
        with self.assertRaises(AssertionError):
            compose(identity(2), identity(3))

    def test_compose_associative(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            a, b, c, d = rng.integers(0, 3, size=4)
            m1 = rng.integers(0, 3, size=(a, b)).astype(np.int8)
            m2 = rng.integers(0, 3, size=(b, c)).astype(np.int8)
            m3 = rng.integers(0, 3, size=(c, d)).astype(np.int8)
            left = compose(compose(m1, m2), m3)
            right = compose(m1, compose(m2, m3))
            self.assertTrue(np.array_equal(left, right))
            self.assertTrue(np.array_equal(compose(m1, m2), naive_compose(m1, m2)))

    def test_compose_associative_exhaustive(self):
        entries = [U, L, S]
        matrices = [sc_matrix([[p, q]]) for p, q in itertools.product(entries, repeat=2)]
        columns = [sc_matrix([[p], [q]]) for p, q in itertools.product(entries, repeat=2)]
        for m1, m2, m3 in itertools.product(matrices, columns, matrices):
            self.assertTrue(
                np.array_equal(compose(compose(m1, m2), m3), compose(m1, compose(m2, m3))))

    def test_identity(self):
        m = sc_matrix([[S, U], [L, S]])
        self.assertTrue(np.array_equal(compose(identity(2), m), m))
        self.assertTrue(np.array_equal(compose(m, identity(2)), m))
        self.assertTrue(is_idempotent(identity(2)))
        self.assertFalse(has_strict_diagonal(identity(2)))

    def test_format(self):
        self.assertEqual(format_matrix(sc_matrix([[S, L], [U, S]])), "< =\n? <")
        self.assertEqual(format_matrix(sc_matrix([])), "[0x0]")


class Test_Edges(unittest.TestCase):
    def test_edge_matrix(self):
        a = OVar("a")
        gamma = PosCtx().assume(a)
        w, gamma = fresh_witness(gamma, a)
        m = edge_matrix(gamma, (a, ), (w, a, INF, Succ(a)))
        self.assertEqual(list(m[0]), [S, L, U, U])

    def test_unresolved_argument(self):
        from szm.syntax.ordinals import OUVar

        m = edge_matrix(PosCtx(), (OVar("a"), ), (OUVar(3), ))
        self.assertEqual(m[0, 0], U)


class Test_WellFounded(unittest.TestCase):
    def graph(self, arities, edges):
        graph = CallGraph()
        for node, arity in arities.items():
            graph.add_node(node, arity)
        for src, dst, m in edges:
            graph.add_edge(src, dst, m)
        return graph

    def test_decreasing_loop(self):
        self.assertTrue(check_well_founded(self.graph({1: 1}, [(1, 1, sc_matrix([[S]]))])))

    def test_non_decreasing_loop(self):
        verdict = check_well_founded(self.graph({1: 1}, [(1, 1, sc_matrix([[L]]))]))
        self.assertFalse(verdict)
        self.assertEqual(verdict.node, 1)
        self.assertEqual(verdict.matrix[0, 0], L)

    def test_loop_without_parameters(self):
        empty = np.zeros((0, 0), dtype=np.int8)
        self.assertFalse(check_well_founded(self.graph({1: 0}, [(1, 1, empty)])))

    def test_mutual_recursion(self):
        graph = self.graph({1: 1, 2: 1}, [(1, 2, sc_matrix([[S]])), (2, 1, sc_matrix([[L]]))])
        self.assertTrue(check_well_founded(graph))
        graph.add_edge(2, 2, sc_matrix([[L]]))
        self.assertFalse(check_well_founded(graph))

    def test_permuted_decrease(self):
        m = sc_matrix([[U, S], [S, U]])
        self.assertFalse(is_idempotent(m))
        self.assertTrue(check_well_founded(self.graph({1: 2}, [(1, 1, m)])))

    def test_acyclic(self):
        graph = self.graph({1: 1, 2: 1}, [(1, 2, sc_matrix([[U]]))])
        self.assertTrue(check_well_founded(graph))
        self.assertEqual(saturate(graph), [])

    def test_saturation_limit(self):
        graph = self.graph({1: 1}, [(1, 1, sc_matrix([[L]])), (1, 1, sc_matrix([[S]]))])
        self.assertIsNone(saturate(graph, limit=1))
        self.assertEqual(len(saturate(graph)), 2)

    def test_remove_edge(self):
        graph = self.graph({1: 1}, [])
        edge = graph.add_edge(1, 1, sc_matrix([[L]]))
        self.assertFalse(check_well_founded(graph))
        graph.remove_edge(edge)
        self.assertTrue(check_well_founded(graph))

    def agrees_with_descent(self, arities, edges):
        verdict = check_well_founded(self.graph(arities, edges))
        self.assertEqual(bool(verdict), descent_oracle(arities, edges), (arities, edges))

    def test_against_descent_random(self):
        rng = np.random.default_rng(1)
        for _ in range(300):
            count = int(rng.integers(1, 4))
            arities = {node: int(rng.integers(0, 3)) for node in range(1, count + 1)}
            edges = []
            for _ in range(int(rng.integers(0, 5))):
                src = int(rng.integers(1, count + 1))
                dst = int(rng.integers(1, count + 1))
                m = rng.integers(0, 3, size=(arities[src], arities[dst])).astype(np.int8)
                edges.append((src, dst, m))
            self.agrees_with_descent(arities, edges)

    def test_against_descent_one_node(self):
        for arity in range(3):
            loops = list(all_matrices(arity, arity))
            for count in (1, 2):
                for chosen in itertools.combinations_with_replacement(loops, count):
                    self.agrees_with_descent({1: arity}, [(1, 1, m) for m in chosen])

    def test_against_descent_two_nodes(self):
        for a, b in itertools.product(range(3), repeat=2):
            for there, back in itertools.product(all_matrices(a, b), all_matrices(b, a)):
                self.agrees_with_descent({1: a, 2: b}, [(1, 2, there), (2, 1, back)])

    def test_against_descent_three_nodes(self):
        # Arity one, at most one edge per ordered pair of nodes.
        arities = {1: 1, 2: 1, 3: 1}
        pairs = list(itertools.product(arities, repeat=2))
        for count in range(5):
            for chosen in itertools.combinations(pairs, count):
                for entries in itertools.product([U, L, S], repeat=count):
                    edges = [(src, dst, sc_matrix([[e]])) for (src, dst), e in zip(chosen, entries)]
                    self.agrees_with_descent(arities, edges)


if __name__ == '__main__':
    unittest.main()
