"""Buchberger's algorithm over the rationals with cofactor tracking.

Every basis element carries its representation as a combination of the
original generators, so ideal membership comes back with explicit cofactors:
f = sum h_j g_j.  Orders of magnitude are tiny here (presentations have a
handful of low-degree generators), so no pair-selection heuristics are needed.
"""

from __future__ import annotations

from fractions import Fraction

from .poly import Poly, divmod_multi, mono_div, mono_divides, mono_lcm


class GroebnerBasis:
    """Reduced Groebner basis (graded-lex) of the ideal generated by gens."""

    def __init__(self, gens: list[Poly]):
        if not gens:
            raise ValueError("need at least one generator (possibly zero)")
        self.nvars = gens[0].nvars
        self.gens = [g.copy() for g in gens]
        basis, reps = self._buchberger()
        self.basis = basis
        self.reps = reps

    def _buchberger(self) -> tuple[list[Poly], list[list[Poly]]]:
        n = self.nvars
        k = len(self.gens)
        basis: list[Poly] = []
        reps: list[list[Poly]] = []
        for j, g in enumerate(self.gens):
            if g.is_zero():
                continue
            basis.append(g)
            reps.append([Poly.const(n, 1 if i == j else 0) for i in range(k)])
        pairs = [(i, j) for i in range(len(basis)) for j in range(i)]
        while pairs:
            i, j = pairs.pop()
            fi, fj = basis[i], basis[j]
            mi, ci = fi.leading()
            mj, cj = fj.leading()
            lcm = mono_lcm(mi, mj)
            s = fi.term_mul(mono_div(lcm, mi), Fraction(1) / ci) - fj.term_mul(
                mono_div(lcm, mj), Fraction(1) / cj
            )
            rep = [
                a.term_mul(mono_div(lcm, mi), Fraction(1) / ci)
                - b.term_mul(mono_div(lcm, mj), Fraction(1) / cj)
                for a, b in zip(reps[i], reps[j])
            ]
            r, r_rep = self._reduce_tracked(s, rep, basis, reps)
            if not r.is_zero():
                for idx in range(len(basis)):
                    pairs.append((len(basis), idx))
                basis.append(r)
                reps.append(r_rep)
        return self._interreduce(basis, reps)

    def _reduce_tracked(self, f, f_rep, basis, reps):
        quotients, r = divmod_multi(f, basis)
        rep = list(f_rep)
        for q, b_rep in zip(quotients, reps):
            if q.is_zero():
                continue
            rep = [a - q * c for a, c in zip(rep, b_rep)]
        return r, rep

    def _interreduce(self, basis, reps):
        # drop elements whose leading monomial is divisible by another's
        keep = []
        for i, f in enumerate(basis):
            mi, _ = f.leading()
            redundant = False
            for j, g in enumerate(basis):
                if i == j:
                    continue
                mj, _ = g.leading()
                if mono_divides(mj, mi) and (mj != mi or j < i):
                    redundant = True
                    break
            if not redundant:
                keep.append(i)
        basis = [basis[i] for i in keep]
        reps = [reps[i] for i in keep]
        # fully reduce each element against the others, then normalize monic
        changed = True
        while changed:
            changed = False
            for i in range(len(basis)):
                others = basis[:i] + basis[i + 1:]
                other_reps = reps[:i] + reps[i + 1:]
                r, rep = self._reduce_tracked(basis[i], reps[i], others, other_reps)
                if r != basis[i]:
                    basis[i], reps[i] = r, rep
                    changed = True
        out_basis, out_reps = [], []
        for f, rep in zip(basis, reps):
            if f.is_zero():
                continue
            _, c = f.leading()
            inv = Fraction(1) / c
            out_basis.append(f.scale(inv))
            out_reps.append([p.scale(inv) for p in rep])
        order = sorted(
            range(len(out_basis)),
            key=lambda i: out_basis[i].leading()[0],
        )
        return [out_basis[i] for i in order], [out_reps[i] for i in order]

    def normal_form(self, f: Poly) -> Poly:
        """Unique remainder of f modulo the ideal; zero iff f is a member
        with polynomial cofactors."""
        if not self.basis:
            return f.copy()
        _, r = divmod_multi(f, self.basis)
        return r

    def membership_cofactors(self, f: Poly) -> list[Poly] | None:
        """Cofactors h with f = sum h_j gens_j, or None if reduction is nonzero."""
        if not self.basis:
            return None if not f.is_zero() else [Poly.zero(self.nvars) for _ in self.gens]
        quotients, r = divmod_multi(f, self.basis)
        if not r.is_zero():
            return None
        cof = [Poly.zero(self.nvars) for _ in self.gens]
        for q, rep in zip(quotients, self.reps):
            if q.is_zero():
                continue
            cof = [c + q * pr for c, pr in zip(cof, rep)]
        return cof
