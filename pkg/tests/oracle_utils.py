"""Independent brute-force conjugacy oracle used by the test suite.

Enumerates *all* reduced words to a fixed letter cap, keeps the hyperbolic
elements with translation length <= R, and merges conjugates by union-find:
nodes are exact group elements (sign-normalized matrix keys) and edges are
single-letter conjugations.  Any two spellings of conjugate elements inside
the cap are connected by peeling conjugator letters one at a time, and
relator rewrites are equalities of elements, so they need no edges.  The
production enumeration is only consulted for the generator matrices; the
dedupe mechanism is entirely different from its canonical-axis keys.
"""

from __future__ import annotations

import numpy as np

from hyplab.surface_group import FuchsianRep, inverse_letter


def reduced_word_matrices(rep0: FuchsianRep, max_len: int):
    """All nonempty reduced words up to max_len with matrices, vectorized."""
    gens = np.stack(rep0.letter_mats)
    words: list[tuple[int, ...]] = []
    mats_list: list[np.ndarray] = []
    frontier_words = [()]
    frontier_mats = np.eye(2)[None]
    frontier_last = np.array([-1], dtype=np.int8)
    allowed = np.array(
        [[l for l in range(8) if l != inverse_letter(last)] for last in range(8)],
        dtype=np.int8,
    )
    for depth in range(1, max_len + 1):
        if depth == 1:
            letters = np.arange(8, dtype=np.int8)
            parents = np.zeros(8, dtype=np.int64)
        else:
            letters = allowed[frontier_last].reshape(-1)
            parents = np.repeat(np.arange(len(frontier_mats), dtype=np.int64), 7)
        child = np.matmul(frontier_mats[parents], gens[letters])
        child_words = [frontier_words[p] + (int(l),) for p, l in zip(parents, letters)]
        words.extend(child_words)
        mats_list.append(child)
        frontier_words, frontier_mats, frontier_last = child_words, child, letters
    return words, np.concatenate(mats_list, axis=0)


def element_keys(mats: np.ndarray) -> np.ndarray:
    """(n, 5) int64 keys identifying group elements (sign-normalized)."""
    flat = mats.reshape(-1, 4)
    norms = np.sqrt((flat * flat).sum(axis=1))
    unit = flat / norms[:, None]
    sign = np.ones(len(flat))
    undecided = np.ones(len(flat), dtype=bool)
    for j in range(4):
        pick = undecided & (np.abs(unit[:, j]) > 0.3)
        sign[pick] = np.sign(unit[pick, j])
        undecided &= ~pick
    unit = unit * sign[:, None]
    keys = np.empty((len(flat), 5), dtype=np.int64)
    keys[:, :4] = np.round(unit * 1e6)
    keys[:, 4] = np.round(np.log(norms) * 1e6)
    return keys


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        p = self.parent.setdefault(x, x)
        if p != x:
            p = self.parent[x] = self.find(p)
        return p

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def oracle_conjugacy_classes(
    rep0: FuchsianRep,
    R: float,
    *,
    word_cap: int = 8,
) -> list[dict]:
    """Primitive conjugacy classes with length <= R, by exhaustive dedupe."""
    words, mats = reduced_word_matrices(rep0, word_cap)
    tr = np.abs(mats[:, 0, 0] + mats[:, 1, 1])
    # nontrivial elements of the torsion-free cocompact group have
    # |tr| >= 2 cosh(systole/2) > 3.4; gate at 2.5 rejects fp-noise identities
    hyp = tr > 2.5
    ell = np.where(hyp, 2.0 * np.arccosh(np.clip(tr / 2.0, 1.0, None)), np.inf)
    keep = np.nonzero(hyp & (ell <= R + 1e-9))[0]

    kept_mats = mats[keep]
    kept_keys = element_keys(kept_mats)
    uf = _UnionFind()
    node_of = {}
    for i, key in enumerate(map(tuple, kept_keys)):
        node_of.setdefault(key, []).append(int(keep[i]))
        uf.find(key)

    gens = np.stack(rep0.letter_mats)
    gen_invs = np.stack([rep0.letter_mats[inverse_letter(l)] for l in range(8)])
    for l in range(8):
        conj = np.matmul(np.matmul(gen_invs[l][None], kept_mats), gens[l][None])
        for key, ckey in zip(map(tuple, kept_keys), map(tuple, element_keys(conj))):
            uf.union(key, ckey)

    components: dict = {}
    for key, rows in node_of.items():
        components.setdefault(uf.find(key), []).extend(rows)

    records = []
    for rows in components.values():
        lens = ell[rows]
        assert lens.max() - lens.min() < 1e-7, "inconsistent lengths in one class"
        best = min(rows, key=lambda r: (len(words[r]), words[r]))
        records.append(
            {"word": words[best], "length": float(lens.min()), "matrix": mats[best]}
        )
    records.sort(key=lambda r: (r["length"], r["word"]))

    # primitivity: class is a proper power iff the m-th power of some class of
    # length l/m is in its component
    key_root = {key: uf.find(key) for key in node_of}
    root_of_record = []
    for r in records:
        root_of_record.append(uf.find(tuple(element_keys(r["matrix"][None])[0])))
    lengths = np.array([r["length"] for r in records])
    min_len = float(lengths.min())
    primitive = []
    for i, r in enumerate(records):
        is_prim = True
        for m in range(2, int(r["length"] / (min_len - 1e-9)) + 1):
            target = r["length"] / m
            for j in np.nonzero(np.abs(lengths - target) < 1e-6)[0]:
                Mm = np.linalg.matrix_power(records[j]["matrix"], m)
                key = tuple(element_keys(Mm[None])[0])
                if key in key_root and key_root[key] == root_of_record[i]:
                    is_prim = False
                    break
            if not is_prim:
                break
        if is_prim:
            primitive.append(r)
    return primitive
