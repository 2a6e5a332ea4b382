"""Emergent causal structure read off from closed-chain spectra.

A pair of points is called *timelike* separated when every root of its closed
chain is real, and *spacelike* separated when the roots come in complex
conjugate pairs that all share one modulus.  Chains that satisfy neither test
at the working tolerance are *undetermined* (root patterns such as conjugate
pairs of different moduli occur away from minimizers).  The tests are applied
in that order, so an all-real equal-modulus spectrum counts as timelike and
the classification is deterministic.

Tolerances scale with the spectrum: the default thresholds are
``1e-9 * (1 + max |lam|)`` for both the imaginary parts and the modulus
spread, overridable per call.
"""

import enum
import json

import numpy as np

from .action import chain_blocks, chain_roots, kernel_blocks, multiset_distance
from .tolerances import DEFAULT

__all__ = ["CausalClass", "classify", "classify_chain", "CausalGraph", "causal_graph"]


class CausalClass(enum.Enum):
    TIMELIKE = "timelike"
    SPACELIKE = "spacelike"
    UNDETERMINED = "undetermined"

    def short(self):
        return {"timelike": "t", "spacelike": "s", "undetermined": "u"}[self.value]


def classify(roots, tau_im=None, tau_mod=None, tol=DEFAULT):
    """Causal class of a root multiset.

    Parameters
    ----------
    roots : array_like of complex
        Roots of one closed chain.
    tau_im, tau_mod : float, optional
        Absolute thresholds for the realness test and for the
        conjugate-pair / equal-modulus test.  Default: scale-aware
        ``tol.causal * (1 + max |lam|)``.
    """
    lam = np.asarray(roots, dtype=complex).ravel()
    if lam.size == 0:
        raise ValueError("cannot classify an empty root multiset")
    scale = tol.causal * (1.0 + float(np.max(np.abs(lam))))
    if tau_im is None:
        tau_im = scale
    if tau_mod is None:
        tau_mod = scale
    if np.max(np.abs(lam.imag)) <= tau_im:
        return CausalClass.TIMELIKE
    mod = np.abs(lam)
    paired = multiset_distance(lam, np.conj(lam)) <= tau_mod
    if paired and (mod.max() - mod.min()) <= tau_mod:
        return CausalClass.SPACELIKE
    return CausalClass.UNDETERMINED


def classify_chain(chain, tau_im=None, tau_mod=None, tol=DEFAULT):
    """Causal class of a :class:`~dstlab.action.ClosedChain` (or bare matrix)."""
    roots = getattr(chain, "roots", None)
    if roots is None:
        roots = np.linalg.eigvals(np.asarray(chain, dtype=complex))
    return classify(roots, tau_im, tau_mod, tol)


class CausalGraph:
    """Pairwise causal classes of a discrete space-time, m x m and symmetric."""

    def __init__(self, classes):
        classes = np.asarray(classes, dtype=object)
        if classes.ndim != 2 or classes.shape[0] != classes.shape[1]:
            raise ValueError("classes must be a square matrix")
        self.classes = classes
        self.m = classes.shape[0]

    def __getitem__(self, xy):
        return self.classes[xy]

    def is_symmetric(self):
        return all(
            self.classes[x, y] is self.classes[y, x]
            for x in range(self.m)
            for y in range(x + 1, self.m)
        )

    def counts(self):
        """Unordered-pair counts per class (diagonal counted once)."""
        out = {c: 0 for c in CausalClass}
        for x in range(self.m):
            for y in range(x, self.m):
                out[self.classes[x, y]] += 1
        return out

    def off_diagonal_class(self):
        """The common class of all x != y pairs, or None if mixed."""
        vals = {self.classes[x, y] for x in range(self.m) for y in range(self.m) if x != y}
        return vals.pop() if len(vals) == 1 else None

    def to_json(self):
        """Adjacency-list JSON: per point, the neighbors by class."""
        adj = []
        for x in range(self.m):
            entry = {c.value: [] for c in CausalClass}
            for y in range(self.m):
                entry[self.classes[x, y].value].append(y)
            adj.append(entry)
        return json.dumps({"m": self.m, "adjacency": adj})

    def to_edge_list(self):
        """DIMACS-like edge list over unordered pairs, classes as t/s/u."""
        lines = [f"p causal {self.m} {self.m * (self.m + 1) // 2}"]
        for x in range(self.m):
            for y in range(x, self.m):
                lines.append(f"e {x} {y} {self.classes[x, y].short()}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        m = int(data["m"])
        classes = np.empty((m, m), dtype=object)
        for x, entry in enumerate(data["adjacency"]):
            for name, ys in entry.items():
                for y in ys:
                    classes[x, y] = CausalClass(name)
        return cls(classes)


def causal_graph(projector, tau_im=None, tau_mod=None, tol=DEFAULT):
    """Classify every point pair of a fermionic projector.

    The chain roots for (x,y) and (y,x) agree, so the graph is symmetric by
    construction; classification runs on the upper triangle and mirrors.
    """
    roots = chain_roots(chain_blocks(kernel_blocks(projector)))
    m = projector.space.m
    classes = np.empty((m, m), dtype=object)
    for x in range(m):
        for y in range(x, m):
            c = classify(roots[x, y], tau_im, tau_mod, tol)
            classes[x, y] = c
            classes[y, x] = c
    return CausalGraph(classes)
