"""
Per-field tables shared by the counting engines.

For every prime ideal P up to a norm bound we store its wide class, the
exponent shift e with P * prod G_i^e principal, and a generator beta of that
principal ideal.  Products of the betas give alpha_0 for any squarefree ideal
multiplicatively, and their residues mod 4 feed both the conductor test and
the ray class logs.  The table only ever grows, so it can be shared between
bounds.
"""

from dataclasses import dataclass
from threading import Lock

from .arith import primes_upto
from .classgroup import class_group, odd_basis, principal_generator
from .quadfield import (
    FieldElement,
    QuadField,
    ideal_mul,
    ideal_pow,
    primes_above,
    residue_index,
)


@dataclass(frozen=True)
class PrimeRecord:
    index: int
    p: int
    norm: int
    kind: str
    which: int
    ideal: object
    cls: tuple  # wide class coordinates
    shift: tuple  # e_i in [0, n_i) with P * prod G_i^{e_i} principal
    beta: FieldElement  # generator of that ideal
    res: int  # beta mod 4 as a residue index
    neg: bool  # N(beta) < 0
    conj: int  # index of the conjugate record


class FieldData:
    def __init__(self, k):
        self.k = k
        self.G = class_group(k)
        self.basis = odd_basis(k)
        self.divisors = tuple(self.G.elementary_divisors)
        self.records = []
        self.bound = 1
        self._lock = Lock()
        gam = self.basis.gammas
        self.gamma_res = tuple(residue_index(g.x, g.y) for g in gam)
        self.gamma_neg = tuple(g.norm() < 0 for g in gam)
        self.twos = list(primes_above(k, 2))
        self._seen = set()
        self._sorted = []

    def extend(self, M):
        """Make sure every prime ideal of norm <= M is present."""
        M = int(M)
        with self._lock:
            if M <= self.bound:
                return
            k, G = self.k, self.G
            ideals = self.basis.ideals
            for p in primes_upto(M):
                Ps = primes_above(k, p)
                if Ps[0].norm > M or (p, 0) in self._seen:
                    continue
                base = len(self.records)
                for P in Ps:
                    v = G.ideal_class(P.ideal)
                    e = tuple((-x) % n for x, n in zip(v, self.divisors))
                    J = P.ideal
                    for Gi, ei in zip(ideals, e):
                        if ei:
                            J = ideal_mul(J, ideal_pow(Gi, ei))
                    beta = principal_generator(J)
                    if beta is None:
                        raise RuntimeError("shifted prime is not principal")
                    idx = len(self.records)
                    conj = base + (1 - P.which) if P.kind == "split" else idx
                    self.records.append(
                        PrimeRecord(
                            idx, P.p, P.norm, P.kind, P.which, P.ideal, v, e,
                            beta, residue_index(beta.x, beta.y), beta.norm() < 0, conj,
                        )
                    )
                    self._seen.add((p, P.which))
            self._sorted = sorted(self.records, key=lambda r: (r.norm, r.p, r.which))
            self.bound = M

    def prime_list(self, M):
        """Records of norm <= M, sorted by norm."""
        self.extend(M)
        out = []
        for r in self._sorted:
            if r.norm > M:
                break
            out.append(r)
        return out


_cache = {}
_cache_lock = Lock()


def field_data(k, M=1):
    if isinstance(k, int):
        k = QuadField(k)
    with _cache_lock:
        fd = _cache.get(k.d)
        if fd is None:
            fd = FieldData(k)
            _cache[k.d] = fd
    fd.extend(M)
    return fd
