"""Genus-2 surface group: words, the reference Fuchsian realization, and
conjugacy-class enumeration ordered by hyperbolic length.

The reference group is generated by the side pairings of the regular
hyperbolic octagon with vertex angle pi/4, sides labeled in the standard
pattern a1 b1 a1^-1 b1^-1 a2 b2 a2^-1 b2^-1, so the single defining relator
is the commutator word [a1,b1][a2,b2].

Letters are encoded 0..7 in the order a1, b1, a2, b2, A1, B1, A2, B2
(capitals are inverses); the inverse of letter i is (i + 4) % 8.  All
deterministic tie-breaks use this letter order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .hyperbolic import (
    NotHyperbolic,
    boundary_angle,
    sl2_fixed_points,
    sl2_translation_length,
)

LETTER_NAMES = ("a1", "b1", "a2", "b2", "A1", "B1", "A2", "B2")
_NAME_TO_LETTER = {n: i for i, n in enumerate(LETTER_NAMES)}
N_LETTERS = 8

# relator [a1,b1][a2,b2] = a1 b1 A1 B1 a2 b2 A2 B2
RELATOR = (0, 1, 4, 5, 2, 3, 6, 7)

# octagon circumradius: cosh Rc = cot^2(pi/8)
OCTAGON_CIRCUMRADIUS = float(np.arccosh((1.0 / np.tan(np.pi / 8)) ** 2))

# enumeration constants: prefix orbits of a geodesic spelling of a class with
# axis through the Dirichlet octagon stay within disp <= R + 2*Rc + slack;
# the slack absorbs fellow-traveling, calibrated against the brute-force
# conjugacy oracle (see tests)
PRUNE_SLACK = 3.0
AXIS_SLACK = 0.75


class ConstructionError(RuntimeError):
    """Reference Fuchsian construction failed its own tolerance checks."""


class BudgetExceeded(RuntimeError):
    """Enumeration would exceed the word-length cap or node budget."""


def inverse_letter(letter: int) -> int:
    return (letter + 4) % N_LETTERS


# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Word:
    """Word in the eight generator letters; empty word is the identity."""

    letters: tuple[int, ...] = ()

    @classmethod
    def parse(cls, text: str) -> "Word":
        toks = text.split()
        try:
            return cls(tuple(_NAME_TO_LETTER[t] for t in toks))
        except KeyError as exc:
            raise ValueError(f"unknown letter {exc.args[0]!r}") from exc

    def __str__(self) -> str:
        return " ".join(LETTER_NAMES[l] for l in self.letters)

    def __len__(self) -> int:
        return len(self.letters)

    def inverse(self) -> "Word":
        return Word(tuple(inverse_letter(l) for l in reversed(self.letters)))

    def __mul__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def is_reduced(self) -> bool:
        ls = self.letters
        return all(ls[i + 1] != inverse_letter(ls[i]) for i in range(len(ls) - 1))


def _free_reduce(letters) -> tuple[int, ...]:
    out: list[int] = []
    for l in letters:
        if out and out[-1] == inverse_letter(l):
            out.pop()
        else:
            out.append(l)
    return tuple(out)


def reduce(w: Word) -> Word:
    """Free reduction; idempotent."""
    return Word(_free_reduce(w.letters))


def _cyclic_reduce(letters: tuple[int, ...]) -> tuple[int, ...]:
    ls = _free_reduce(letters)
    while len(ls) >= 2 and ls[0] == inverse_letter(ls[-1]):
        ls = _free_reduce(ls[1:-1])
    return ls


def _inverse_letters(letters) -> tuple[int, ...]:
    return tuple(inverse_letter(l) for l in reversed(letters))


# the 16 cyclic relator forms: rotations of the relator and of its inverse
def _relator_forms() -> tuple[tuple[int, ...], ...]:
    forms = []
    for base in (RELATOR, _inverse_letters(RELATOR)):
        for k in range(len(base)):
            forms.append(base[k:] + base[:k])
    return tuple(forms)


RELATOR_FORMS = _relator_forms()
_PREFIX_TO_FORM = {L: {f[:L]: f for f in RELATOR_FORMS} for L in (7, 6, 5, 4)}


def _rotations(letters: tuple[int, ...]):
    n = len(letters)
    return [letters[k:] + letters[:k] for k in range(n)]


def _dehn_shorten(letters: tuple[int, ...]) -> tuple[int, ...]:
    """Shorten a cyclic word against more-than-half relator subwords."""
    w = _cyclic_reduce(letters)
    changed = True
    while changed and w:
        changed = False
        for rot in _rotations(w):
            for L in (7, 6, 5):
                if len(rot) < L:
                    continue
                form = _PREFIX_TO_FORM[L].get(rot[:L])
                if form is not None:
                    repl = _inverse_letters(form[L:])
                    w = _cyclic_reduce(repl + rot[L:])
                    changed = True
                    break
            if changed:
                break
    return w


def _minimal_cyclic_words(letters: tuple[int, ...]) -> list[tuple[int, ...]]:
    """All minimal-length cyclic representatives reachable by rotations and
    length-preserving half-relator swaps."""
    start = _dehn_shorten(letters)
    best = len(start)
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for w in frontier:
            for rot in _rotations(w):
                cands = [rot]
                if len(rot) >= 4:
                    form = _PREFIX_TO_FORM[4].get(rot[:4])
                    if form is not None:
                        cands.append(_cyclic_reduce(_inverse_letters(form[4:]) + rot[4:]))
                for cand in cands:
                    if len(cand) < best:
                        # a swap exposed further shortening; restart smaller
                        return _minimal_cyclic_words(cand)
                    if cand not in seen:
                        seen.add(cand)
                        nxt.append(cand)
        frontier = nxt
        if len(seen) > 20000:
            raise RuntimeError("runaway cyclic closure; canonicalization bug")
    return sorted(seen)


# ---------------------------------------------------------------------------
# reference Fuchsian representation


@dataclass(frozen=True)
class FuchsianRep:
    """Four real SL(2) generator matrices (images of a1, b1, a2, b2)."""

    gens: tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]
    relator_residual: float
    # per-letter matrices, letters 0..7 (generators then inverses)
    letter_mats: tuple[np.ndarray, ...] = field(repr=False, default=())

    def matrix(self, letter: int) -> np.ndarray:
        return self.letter_mats[letter]

    def evaluate(self, w: Word) -> np.ndarray:
        M = np.eye(2)
        for l in w.letters:
            M = M @ self.letter_mats[l]
        return M


def _sl2_adjugate(M: np.ndarray) -> np.ndarray:
    return np.array([[M[1, 1], -M[0, 1]], [-M[1, 0], M[0, 0]]])


def _pm_identity_residual(M: np.ndarray, dim: int = 2) -> float:
    eye = np.eye(dim)
    return float(min(np.linalg.norm(M - eye), np.linalg.norm(M + eye)))


def _disk_translate(p: complex) -> np.ndarray:
    s = 1.0 / math.sqrt(1.0 - abs(p) ** 2)
    return np.array([[1.0, -p], [-np.conj(p), 1.0]], dtype=complex) * s


def _disk_rotation(phi: float) -> np.ndarray:
    return np.array([[np.exp(0.5j * phi), 0.0], [0.0, np.exp(-0.5j * phi)]], dtype=complex)


def _disk_apply(M: np.ndarray, z: complex) -> complex:
    return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


def _disk_isometry(p: complex, q: complex, p2: complex, q2: complex) -> np.ndarray:
    """Unique orientation-preserving disk isometry with p -> p2 and q -> q2."""
    A = _disk_translate(p)
    B = _disk_translate(p2)
    R = _disk_rotation(float(np.angle(_disk_apply(B, q2)) - np.angle(_disk_apply(A, q))))
    M = np.linalg.inv(B) @ R @ A
    return M / np.sqrt(np.linalg.det(M))


@lru_cache(maxsize=1)
def fuchsian_reference() -> FuchsianRep:
    """Genus-2 cocompact Fuchsian group from the regular octagon.

    Vertices sit at angles j*pi/4 + pi/8 on the circle of hyperbolic radius
    arccosh(cot^2(pi/8)); side j runs from vertex j-1 to vertex j.  a1 pairs
    side 2 onto side 0 (endpoint correspondence v1 -> v0, v2 -> v7), b1 is
    the inverse of the pairing of side 3 onto side 1, and a2, b2 are the
    conjugates of a1, b1 by the rotation through pi.
    """
    r_e = math.tanh(OCTAGON_CIRCUMRADIUS / 2.0)
    verts = [r_e * np.exp(1j * (j * np.pi / 4 + np.pi / 8)) for j in range(8)]

    a1_disk = _disk_isometry(verts[1], verts[2], verts[0], verts[7])
    b1_disk = np.linalg.inv(_disk_isometry(verts[2], verts[3], verts[1], verts[0]))
    rot = _disk_rotation(np.pi)
    rot_inv = np.linalg.inv(rot)
    a2_disk = rot @ a1_disk @ rot_inv
    b2_disk = rot @ b1_disk @ rot_inv

    from .hyperbolic import DISK_TO_UHP, UHP_TO_DISK

    gens = []
    for g in (a1_disk, b1_disk, a2_disk, b2_disk):
        h = DISK_TO_UHP @ g @ UHP_TO_DISK
        if np.abs(h.imag).max() > 1e-12:
            raise ConstructionError("octagon pairing did not produce a real matrix")
        hr = h.real.copy()
        hr /= math.copysign(math.sqrt(abs(np.linalg.det(hr))), 1.0)
        gens.append(hr)

    letter_mats = tuple(gens) + tuple(_sl2_adjugate(g) for g in gens)
    rep = FuchsianRep(tuple(gens), 0.0, letter_mats)
    rel = rep.evaluate(Word(RELATOR))
    residual = _pm_identity_residual(rel)
    if residual > 1e-10:
        raise ConstructionError(f"relator residual {residual:.3e} exceeds 1e-10")
    for g in gens:
        if abs(np.trace(g)) <= 2.0:
            raise ConstructionError("octagon generator is not hyperbolic")
    return FuchsianRep(tuple(gens), residual, letter_mats)


def translation_length(M: np.ndarray) -> float:
    """2*arccosh(|tr M|/2) for hyperbolic M; raises NotHyperbolic otherwise."""
    return sl2_translation_length(M)


def min_generator_length(rep0: FuchsianRep) -> float:
    return min(translation_length(g) for g in rep0.gens)


# ---------------------------------------------------------------------------
# conjugacy classes


@dataclass(frozen=True)
class ConjClass:
    """Canonical conjugacy-class representative with geodesic invariants.

    axis_endpoints are boundary-circle angles in [0, 2pi), attracting first.
    Equality and hashing use the canonical rounded invariants.
    """

    rep_word: Word
    length: float
    axis_endpoints: tuple[float, float]
    primitive: bool

    @property
    def canonical_key(self) -> tuple[int, int, int]:
        a, r = self.axis_endpoints
        return (int(round(a * 1e8)), int(round(r * 1e8)), int(round(self.length * 1e8)))

    def __eq__(self, other) -> bool:
        return isinstance(other, ConjClass) and self.canonical_key == other.canonical_key

    def __hash__(self) -> int:
        return hash(self.canonical_key)

    def uhp_endpoints(self) -> tuple[float, float]:
        """(fix_plus, fix_minus) as reals in the upper-half-plane chart."""
        from .hyperbolic import angle_to_boundary

        a, r = self.axis_endpoints
        return angle_to_boundary(a), angle_to_boundary(r)


def _axis_key(rep0: FuchsianRep, letters: tuple[int, ...]):
    M = rep0.evaluate(Word(letters))
    att, rep = sl2_fixed_points(M)
    ell = sl2_translation_length(M)
    a_ang = boundary_angle(att)
    r_ang = boundary_angle(rep)
    return (int(round(a_ang * 1e8)), int(round(r_ang * 1e8)), int(round(ell * 1e8))), (
        a_ang,
        r_ang,
        ell,
    )


def _is_primitive_cyclic(letters: tuple[int, ...]) -> bool:
    n = len(letters)
    for d in range(1, n):
        if n % d == 0 and letters == letters[d:] + letters[:d]:
            return False
    return True


def canonicalize(rep0: FuchsianRep, w: Word) -> ConjClass:
    """Canonical ConjClass of the (nontrivial, hyperbolic) element of w.

    Among all minimal cyclic representatives (rotations plus half-relator
    swaps after Dehn shortening), picks the one with lexicographically
    smallest rounded (attracting angle, repelling angle, length); letter
    sequence breaks exact ties.
    """
    cands = _minimal_cyclic_words(w.letters)
    if cands[0] == ():
        raise ValueError("word represents the identity (relator conjugate)")
    best = None
    for letters in cands:
        key, data = _axis_key(rep0, letters)
        item = (key, letters, data)
        if best is None or item[:2] < best[:2]:
            best = item
    key, letters, (a_ang, r_ang, ell) = best
    return ConjClass(
        rep_word=Word(letters),
        length=ell,
        axis_endpoints=(a_ang, r_ang),
        primitive=_is_primitive_cyclic(letters),
    )


# ---------------------------------------------------------------------------
# enumeration

# next-letter table: no immediate backtracking
_ALLOWED = np.array(
    [[l for l in range(N_LETTERS) if l != inverse_letter(last)] for last in range(N_LETTERS)],
    dtype=np.int8,
)


def _length_cap(R: float, ell_min: float) -> int:
    # quasi-isometry cap with safety factor 2, per the enumeration contract
    return int(math.ceil(2.0 * R / ell_min)) + 8


def _dedupe_keys(mats: np.ndarray) -> np.ndarray:
    """Per-element keys: sign-normalized direction + log-norm, rounded."""
    flat = mats.reshape(len(mats), 4)
    norms = np.sqrt((flat * flat).sum(axis=1))
    unit = flat / norms[:, None]
    # fix the projective sign by the first entry of magnitude > 0.3
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


def _enumerate_candidate_words(
    rep0: FuchsianRep,
    R: float,
    *,
    prune_slack: float = PRUNE_SLACK,
    axis_slack: float = AXIS_SLACK,
    max_nodes: float = 2.5e8,
) -> list[tuple[int, ...]]:
    """Reduced words w with trace length <= R whose axis passes near the
    basepoint, found by breadth-first search over the word tree with
    displacement pruning and per-level element dedupe."""
    ell_min = min_generator_length(rep0)
    cap = _length_cap(R, ell_min)
    prune_radius = R + 2.0 * OCTAGON_CIRCUMRADIUS + prune_slack
    cosh_prune = math.cosh(prune_radius)
    cosh_axis = math.cosh(OCTAGON_CIRCUMRADIUS + axis_slack)
    max_tr = 2.0 * math.cosh(R / 2.0)

    gens = np.stack(rep0.letter_mats)  # (8, 2, 2)

    # level 0: identity
    mats = np.eye(2)[None, :, :]
    last = np.array([-1], dtype=np.int8)
    history: list[tuple[np.ndarray, np.ndarray]] = []  # (parent row, letter) per level
    collected: list[tuple[int, int]] = []  # (level, row)
    total_nodes = 1

    for depth in range(1, cap + 1):
        n = len(mats)
        if n == 0:
            break
        if depth == 1:
            letters = np.tile(np.arange(8, dtype=np.int8), n)
            parents = np.repeat(np.arange(n, dtype=np.int64), 8)
        else:
            letters = _ALLOWED[last].reshape(-1)
            parents = np.repeat(np.arange(n, dtype=np.int64), 7)
        child = np.matmul(mats[parents], gens[letters])

        # prune by orbit displacement of the prefix
        f2 = (child * child).sum(axis=(1, 2))
        keep = f2 * 0.5 <= cosh_prune
        child, letters, parents, f2 = child[keep], letters[keep], parents[keep], f2[keep]

        # per-level dedupe by group element, first occurrence wins
        keys = _dedupe_keys(child)
        _, first = np.unique(keys, axis=0, return_index=True)
        first.sort()
        child, letters, parents, f2 = child[first], letters[first], parents[first], f2[first]

        total_nodes += len(child)
        if total_nodes > max_nodes:
            raise BudgetExceeded(
                f"enumeration for R={R} exceeded the node budget ({int(max_nodes)})"
            )

        history.append((parents, letters))

        # collect hyperbolic elements with length <= R and axis near basepoint;
        # every nontrivial element has |tr| >= 2 cosh(systole/2) > 3.4, so a
        # gate at 2.5 rejects relator conjugates (|tr| = 2 + fp noise) robustly
        tr = np.abs(child[:, 0, 0] + child[:, 1, 1])
        hyp = tr > 2.5
        cand = hyp & (tr <= max_tr + 1e-9)
        if cand.any():
            ell = 2.0 * np.arccosh(np.clip(tr[cand] / 2.0, 1.0, None))
            cosh_half_disp = np.sqrt((f2[cand] * 0.5 + 1.0) / 2.0)
            near = cosh_half_disp <= np.cosh(ell / 2.0) * cosh_axis
            rows = np.nonzero(cand)[0][near]
            collected.extend((depth, int(r)) for r in rows)

        mats, last = child, letters

    # reconstruct collected words from the per-level parent/letter records
    words = []
    for level, row in collected:
        letters_rev = []
        lev, r = level, row
        while lev >= 1:
            parents, lets = history[lev - 1]
            letters_rev.append(int(lets[r]))
            r = int(parents[r])
            lev -= 1
        words.append(tuple(reversed(letters_rev)))
    return words


_ENUM_CACHE: dict = {"R": -1.0, "classes": None}


def enumerate_conjugacy_classes(
    rep0: FuchsianRep,
    R: float,
    *,
    max_nodes: float = 2.5e8,
    _use_cache: bool = True,
) -> list[ConjClass]:
    """Every primitive conjugacy class with translation length <= R, exactly
    once, sorted by (length, canonical word).  Deterministic."""
    if R <= 0:
        raise ValueError("R must be positive")
    if _use_cache and rep0 is fuchsian_reference() and _ENUM_CACHE["classes"] is not None:
        if R <= _ENUM_CACHE["R"] + 1e-12:
            return [c for c in _ENUM_CACHE["classes"] if c.length <= R + 1e-9]

    words = _enumerate_candidate_words(rep0, R, max_nodes=max_nodes)
    by_key: dict[tuple[int, int, int], ConjClass] = {}
    memo: dict[tuple[int, ...], ConjClass] = {}
    for w in words:
        cyc = _cyclic_reduce(w)
        if not cyc:
            continue
        cls = memo.get(cyc)
        if cls is None:
            cls = canonicalize(rep0, Word(cyc))
            memo[cyc] = cls
        if cls.length <= R + 1e-9 and cls.primitive:
            by_key.setdefault(cls.canonical_key, cls)
    out = sorted(by_key.values(), key=lambda c: (c.canonical_key[2], c.rep_word.letters))

    if _use_cache and rep0 is fuchsian_reference() and R > _ENUM_CACHE["R"]:
        _ENUM_CACHE["R"] = R
        _ENUM_CACHE["classes"] = out
    return out
