"""Seeded property suites over random algebraic Weyl tensors.

Each suite returns a :class:`SuiteResult` (worst residual against its
tolerance).  The CLI's ``verify-algebra`` command and the acceptance tests
both run these functions, so the reported numbers are the tested numbers.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field

import numpy as np

from . import cspace as cs
from . import four_dim as fd
from . import tensor_core as tc
from . import weyl_algebra as wa

# spectra (lambda+, lambda-) with non-generic symmetry spaces
DEGENERATE_PATTERNS = {
    "zero_pair": ((0.0, 1.0, -1.0), (0.0, 0.6, -0.6)),
    "self_dual_zero": ((0.0, 0.0, 0.0), (0.3, 0.5, -0.8)),
    "anti_self_dual_zero": ((0.2, 0.7, -0.9), (0.0, 0.0, 0.0)),
    "symker": ((0.0, 1.0, -1.0), (0.0, -1.0, 1.0)),
    "both_double": ((1.0, 1.0, -2.0), (1.0, 1.0, -2.0)),
    "plus_double": ((1.0, 1.0, -2.0), (0.4, 0.1, -0.5)),
    "flat": ((0.0, 0.0, 0.0), (0.0, 0.0, 0.0)),
}


@dataclass
class SuiteResult:
    name: str
    count: int
    max_residual: float
    tolerance: float
    failures: list[str] = field(default_factory=list)
    details: dict = field(default_factory=dict)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.failures

    def as_dict(self, timing: bool = False) -> dict:
        out = {"name": self.name, "passed": self.passed, "count": self.count,
               "max_residual": _clean(self.max_residual), "tolerance": self.tolerance,
               "failures": list(self.failures[:20]),
               "details": {k: _clean(v) for k, v in sorted(self.details.items())}}
        if timing:
            out["seconds"] = self.seconds
        return out


def _clean(v):
    if isinstance(v, (float, np.floating)):
        return float(v) if np.isfinite(v) else None
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (list, tuple)):
        return [_clean(x) for x in v]
    if isinstance(v, dict):
        return {k: _clean(x) for k, x in v.items()}
    return v


class _Tracker:
    def __init__(self, name, tol):
        self.result = SuiteResult(name, 0, 0.0, tol)
        self._t0 = time.perf_counter()

    def record(self, label, value, scale=1.0, tol=None):
        """Record ``value / scale`` against ``tol`` (the suite tolerance by default)."""
        rel = float(value) / scale
        if not np.isfinite(rel):
            self.result.failures.append(f"{label}: non-finite")
            return
        self.result.max_residual = max(self.result.max_residual, rel)
        if rel > (self.result.tolerance if tol is None else tol):
            self.result.failures.append(f"{label}: {rel:.3e}")

    def expect(self, label, ok):
        if not ok:
            self.result.failures.append(label)

    def done(self, count):
        self.result.count = count
        self.result.seconds = time.perf_counter() - self._t0
        return self.result


def sample_weyl_4d(rng: np.random.Generator, index: int, degenerate_every: int = 5):
    """The spectral generator: a random spectrum in a random oriented frame.

    Every ``degenerate_every``-th draw uses one of :data:`DEGENERATE_PATTERNS`
    (randomly scaled) so that the symmetry spaces are non-trivial.
    """
    frame = tc.random_rotation(rng, 4)
    if degenerate_every and index % degenerate_every == degenerate_every - 1:
        keys = sorted(DEGENERATE_PATTERNS)
        key = keys[(index // degenerate_every) % len(keys)]
        lp, lm = DEGENERATE_PATTERNS[key]
        scale = rng.uniform(0.5, 2.0)
        lp, lm = scale * np.asarray(lp), scale * np.asarray(lm)
    else:
        key = "random"
        lp, lm = fd.random_spectrum(rng), fd.random_spectrum(rng)
    w, spec, sigma = fd.build_weyl_from_spectra(lp, lm, frame)
    return key, w, spec, sigma


def _scale(*ts):
    return float(np.prod([1.0 + tc.norm(t) for t in ts]))


# --------------------------------------------------------------------------
# suites


def lemma_suite(seed: int, count: int = 500, tol: float = 1e-8) -> SuiteResult:
    """Residual identities on bases of ``E_W`` and ``g_W``, brackets, anticommutators and kernels."""
    rng = np.random.default_rng(seed)
    tr = _Tracker("lemma_suite", tol)
    dims = {}
    for i in range(count):
        key, w, _, _ = sample_weyl_4d(rng, i)
        ew = wa.solve_space(w, "E_W").basis
        gw = wa.solve_space(w, "g_W").basis
        dims.setdefault(key, (len(ew), len(gw)))
        for j, h in enumerate(ew):
            s = _scale(w, h)
            tr.record(f"W{i} deg1[{j}]", tc.norm(wa.residual_deg1(w, h)), s)
            tr.record(f"W{i} deg11[{j}]", wa.residual_deg11(w, h), s)
            tr.record(f"W{i} deg+[{j}]", wa.residual_degplus(w, h), s)
            tr.record(f"W{i} deg-[{j}]", wa.residual_degminus(w, h), s)
            tr.record(f"W{i} mainalg[{j}]", wa.residual_mainalg(w, h), s)
            tr.record(f"W{i} cor1[{j}]", wa.check_cor1(w, h), _scale(w, h, h))
            tr.record(f"W{i} cor1ii[{j}]", wa.check_cor1_slots(w, h), _scale(w, h, h))
        for (j, h1), (k, h2) in itertools.combinations_with_replacement(enumerate(ew), 2):
            s = _scale(w, h1, h2)
            tr.record(f"W{i} lie[{j},{k}]", wa.residual_lie(w, tc.commutator(h1, h2)), s)
            tr.record(f"W{i} anti[{j},{k}]",
                      tc.norm(wa.residual_deg1(w, tc.anticommutator(h1, h2))), s)
        for j, h in enumerate(gw):
            tr.record(f"W{i} gW-lie[{j}]", wa.residual_lie(w, h), _scale(w, h))
        rep = wa.check_kernel_obstructions(w)
        tr.record(f"W{i} ker", rep.ker_residual, _scale(w))
        tr.record(f"W{i} ker2", rep.ker2_residual, _scale(w))
    out = tr.done(count)
    out.details = {f"dims_{k}": list(v) for k, v in dims.items()}
    return out


def lattice_suite(seed: int, count: int = 100, angle_tol: float = 1e-8) -> SuiteResult:
    """Kernels of deg1, deg11, deg-, deg+sym coincide; ker(deg+) lies in ker(deg1)."""
    rng = np.random.default_rng(seed)
    tr = _Tracker("equivalence_lattice", angle_tol)
    seen = set()
    for i in range(count):
        key, w, _, _ = sample_weyl_4d(rng, i, degenerate_every=2)
        seen.add(key)
        rep = wa.equivalence_lattice(w, angle_tol=angle_tol)
        for nm in ("deg11", "degminus", "degplus_sym"):
            tr.record(f"W{i}({key}) angle {nm}", rep.max_angle[nm])
            tr.expect(f"W{i}({key}) dim {nm}", rep.dims[nm] == rep.dims["deg1"])
        tr.expect(f"W{i}({key}) deg+ in deg1", rep.degplus_in_deg1)
    # every pattern is drawn once the schedule has cycled
    if count >= 2 * len(DEGENERATE_PATTERNS):
        missing = set(DEGENERATE_PATTERNS) - seen
        tr.expect(f"patterns not exercised: {sorted(missing)}", not missing)
    out = tr.done(count)
    out.details = {"patterns": sorted(seen)}
    return out


def structure_suite(seed: int, count: int = 50, tol_eig: float = 1e-9,
                    tol_super: float = 1e-10) -> SuiteResult:
    """Four-dimensional structure: eigen-relations of the sigma basis, the E_W split,
    both supersymmetry identities on the full basis grid and the symmetric-kernel statement."""
    rng = np.random.default_rng(seed)
    tr = _Tracker("structure_4d", tol_eig)
    split_dims = {}
    for i in range(count):
        key, w, spec, sigma = sample_weyl_4d(rng, i, degenerate_every=2)
        tr.record(f"W{i} eigsym", fd.check_eigsym(w, spec, sigma), _scale(w))
        e = wa.solve_space(w, "E_W").dimension
        s = wa.solve_space(w, "S_W").dimension
        a = wa.solve_space(w, "A_W").dimension
        tr.expect(f"W{i}({key}) split {e} != {s}+{a}", e == s + a)
        split_dims.setdefault(key, (e, s, a))
        anti, comm = fd.supersym_grid(w)
        tr.record(f"W{i} supersym", max(anti, comm), _scale(w), tol_super)
        adm = fd.admissible_symmetric(w)
        if key == "random":
            tr.expect(f"W{i} generic spectrum admits trace-free h", len(adm) == 0)
    # constructed one-dimensional kernels
    w, spec, sigma = fd.build_weyl_from_spectra(*DEGENERATE_PATTERNS["symker"],
                                                tc.random_rotation(rng, 4))
    adm = fd.admissible_symmetric(w)
    s11 = sigma.sigma[0, 0][None] / 2.0
    tr.expect("symker admissible space is span(sigma_11)",
              len(adm) == 1 and wa.same_subspace(adm, s11))
    rep = fd.symker_report(w, sigma.sigma[0, 0])
    tr.expect("symker report", rep.preconditions_ok and rep.conclusion_ok)
    w4, _, _ = fd.build_weyl_from_spectra(*DEGENERATE_PATTERNS["zero_pair"])
    tr.expect("zero_pair has dim E_W = 4", wa.solve_space(w4, "E_W").dimension == 4)
    out = tr.done(count)
    out.details = {f"split_{k}": list(v) for k, v in split_dims.items()}
    return out


def identity_suite(seed: int, count: int = 200, tol: float = 1e-10) -> SuiteResult:
    """The Weyl Gram identity, constructed C-space instances and obstruction agreement."""
    rng = np.random.default_rng(seed)
    tr = _Tracker("four_id", tol)
    consts = []
    solved = obstructed = 0
    for i in range(count):
        _, w, _, _ = sample_weyl_4d(rng, i, degenerate_every=0)
        w2 = tc.norm(w) ** 2
        tr.record(f"W{i} 4id", fd.check_4id(w), w2)
        consts.append(fd.four_id_constant(w))
        v = rng.standard_normal(4)
        sol = cs.solve_zeta(w, -cs.contract_first(w, v))
        tr.record(f"W{i} recover v", float(np.max(np.abs(sol.zeta - v))), 1 + np.abs(v).max())
        tr.expect(f"W{i} constructed status", sol.status == "solved")
        tr.record(f"W{i} obstruction on solvable",
                  tc.norm(cs.obstruction(w, -cs.contract_first(w, v))), w2 * (1 + np.abs(v).max()))
        # alternate solvable and generic right-hand sides
        if i % 2:
            c = -cs.contract_first(w, rng.standard_normal(4))
        else:
            c = rng.standard_normal((4, 4, 4))
            c = c - c.transpose(0, 2, 1)
        sol = cs.solve_zeta(w, c)
        solved += sol.status == "solved"
        obstructed += sol.status == "obstructed"
        tr.expect(f"W{i} obstruction/solve disagreement", cs.obstruction_agrees(w, c))
    tr.expect("mixed statuses", solved > 0 and obstructed > 0)
    out = tr.done(count)
    out.details = {"constant_min": min(consts), "constant_max": max(consts),
                   "solved": solved, "obstructed": obstructed}
    return out


def general_suite(seed: int, dim: int, count: int = 50, tol: float = 1e-8) -> SuiteResult:
    """Dimension-independent statements on random Weyl tensors of dimension ``dim``."""
    rng = np.random.default_rng(seed)
    tr = _Tracker(f"general_dim{dim}", tol)
    for i in range(count):
        w = wa.random_weyl(rng, dim)
        d = wa.weyl_defects(w)
        tr.record(f"W{i} weyl defects", max(d.values()), _scale(w))
        eye = np.eye(dim)
        tr.record(f"W{i} identity in E_W", tc.norm(wa.residual_deg1(w, eye)), _scale(w))
        rep = wa.equivalence_lattice(w)
        tr.expect(f"W{i} lattice", rep.ok)
        for h in wa.solve_space(w, "E_W").basis:
            tr.record(f"W{i} cor1", wa.check_cor1(w, h), _scale(w, h, h))
    return tr.done(count)


def run_algebra_suites(seed: int, count: int, dims=(4,)) -> list[SuiteResult]:
    """Suites used by ``verify-algebra``; ``count`` sizes the lemma suite."""
    out = []
    for n in dims:
        tc.check_dim(n, 4)
        if n == 4:
            out.append(lemma_suite(seed, count))
            out.append(lattice_suite(seed + 1, max(1, count // 5)))
            out.append(structure_suite(seed + 2, max(1, count // 10)))
            out.append(identity_suite(seed + 3, max(2, count // 2)))
        else:
            out.append(general_suite(seed, n, max(1, count // 10)))
    return out
