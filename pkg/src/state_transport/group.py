"""Folner averaging and group-equivariant state transport.

Supports finite groups given by a multiplication table and Z^d given by
commuting generator unitaries.  The transport path is e^{i pi t hbar}
where hbar is the Folner average of a flip projection exchanging the
orbit of the source vector with an orthogonal matched family.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import (
    DetourFailureError,
    FlipInconsistencyError,
    HypothesisError,
    UnsupportedGroupError,
)
from .gram import GramTarget, VectorFamily, gram_complete, gram_matrix
from .linalg import check_state, check_unitary, dagger, op_norm
from .path import PathSegment, UnitaryPath, concat_paths

FLIP_TOL = 1e-10
# Growth constant of the exponential-series estimate for the terminal error.
EXP_SERIES_CONSTANT = float(np.e**np.pi - 1 + np.pi * np.e**np.pi)


@dataclass
class GroupAction:
    """A unitary representation of a finite group or of Z^d.

    Finite: ``table[a][b]`` is the index of the product, ``reps[a]`` its
    unitary, element 0 the identity.  Z^d: ``generators`` is a list of d
    pairwise commuting unitaries and elements are integer tuples.
    """

    kind: str  # "finite" or "Zd"
    dim: int
    table: np.ndarray | None = None
    reps: np.ndarray | None = None
    generators: list[np.ndarray] | None = None
    _spectral: list[tuple[np.ndarray, np.ndarray]] = field(
        default_factory=list, repr=False
    )

    def __post_init__(self):
        if self.kind == "finite":
            if self.table is None or self.reps is None:
                raise UnsupportedGroupError("finite action needs table and reps")
            self.table = np.asarray(self.table, dtype=int)
            self.reps = np.asarray(self.reps, dtype=complex)
        elif self.kind == "Zd":
            if not self.generators:
                raise UnsupportedGroupError("Zd action needs generator unitaries")
            for u in self.generators:
                check_unitary(u)
                w, v = np.linalg.eig(u)
                self._spectral.append((w, v))
        else:
            raise UnsupportedGroupError(f"unknown group kind {self.kind!r}")

    @property
    def rank(self) -> int:
        return len(self.generators) if self.kind == "Zd" else 0

    def identity(self):
        return 0 if self.kind == "finite" else (0,) * self.rank

    def inverse(self, g):
        if self.kind == "Zd":
            return tuple(-k for k in g)
        row = self.table[g]
        return int(np.where(row == 0)[0][0])

    def multiply(self, g, h):
        if self.kind == "Zd":
            return tuple(a + b for a, b in zip(g, h))
        return int(self.table[g][h])

    def rep(self, g) -> np.ndarray:
        if self.kind == "finite":
            return self.reps[g]
        out = np.eye(self.dim, dtype=complex)
        for power, (w, v) in zip(g, self._spectral):
            if power:
                out = out @ (v * w**power) @ np.linalg.inv(v)
        return out

    def multiplicativity_defect(self, samples) -> float:
        worst = 0.0
        for g, h in samples:
            worst = max(
                worst,
                op_norm(self.rep(self.multiply(g, h)) - self.rep(g) @ self.rep(h)),
            )
        return worst


def finite_cyclic_action(n: int, u: np.ndarray) -> GroupAction:
    """Z/n acting through the powers of a unitary of order n."""
    u = check_unitary(u)
    table = np.array([[(a + b) % n for b in range(n)] for a in range(n)])
    reps = [np.eye(u.shape[0], dtype=complex)]
    for _ in range(n - 1):
        reps.append(reps[-1] @ u)
    return GroupAction(kind="finite", dim=u.shape[0], table=table, reps=np.array(reps))


def integer_action(generators: list[np.ndarray]) -> GroupAction:
    """Z^d acting through commuting generator unitaries."""
    return GroupAction(kind="Zd", dim=generators[0].shape[0], generators=list(generators))


@dataclass
class FolnerSet:
    elements: list
    defect: float


def folner_set(action: GroupAction, gens: list, eps: float) -> FolnerSet:
    """Near-invariant finite subset: the whole group when finite, a centered
    box for Z^d with exactly counted translation defect below eps."""
    if action.kind == "finite":
        return FolnerSet(elements=list(range(action.table.shape[0])), defect=0.0)
    d = action.rank
    radius = max(
        (max(abs(k) for k in g) for g in gens), default=1
    )
    half = int(np.ceil(d * radius / eps))
    side = 2 * half + 1
    box = [tuple(p) for p in itertools.product(range(-half, half + 1), repeat=d)]
    box_set = set(box)
    defect = 0.0
    for g in gens:
        shifted = {tuple(a + b for a, b in zip(p, g)) for p in box}
        defect = max(defect, len(box_set ^ shifted) / len(box))
    if defect >= eps:
        raise UnsupportedGroupError(
            f"box of side {side} has defect {defect} >= {eps}"
        )
    return FolnerSet(elements=box, defect=defect)


def average_conjugates(h: np.ndarray, folner: FolnerSet,
                       action: GroupAction) -> np.ndarray:
    """Mean of rep(g)^* h rep(g) over the Folner set; contracts norms and
    nearly commutes with every generator, within 2 * defect * ||h||."""
    norm_h = op_norm(h)
    if norm_h > 1.0 + 1e-10:
        raise HypothesisError("need ||h|| <= 1", measured_gap=norm_h - 1.0)
    acc = np.zeros((action.dim, action.dim), dtype=complex)
    for g in folner.elements:
        u = action.rep(g)
        acc = acc + dagger(u) @ h @ u
    acc = acc / len(folner.elements)
    return (acc + dagger(acc)) / 2


def flip_projection(xis: VectorFamily, zetas: VectorFamily) -> np.ndarray:
    """Projection killing the sums x_g + z_g and fixing the differences.

    Requires equal Gram matrices and mutually orthogonal spans; then the
    difference span is orthogonal to the sum span and the orthogonal
    projection onto the differences does both jobs.
    """
    if xis.size != zetas.size or xis.dim != zetas.dim:
        raise FlipInconsistencyError("families must match in size and dimension")
    gram_gap = float(np.max(np.abs(gram_matrix(xis) - gram_matrix(zetas))))
    if gram_gap > FLIP_TOL:
        raise FlipInconsistencyError(f"Gram matrices differ by {gram_gap:.3e}")
    cross = float(np.max(np.abs(xis.vectors @ dagger(zetas.vectors))))
    if cross > 1e-8:
        raise FlipInconsistencyError(f"spans overlap, cross product {cross:.3e}")
    diffs = xis.vectors - zetas.vectors
    u, s, _ = np.linalg.svd(diffs.T, full_matrices=False)
    rank = int(np.sum(s > 1e-10 * max(s[0], 1e-30)))
    basis = u[:, :rank]
    e = basis @ dagger(basis)
    sums = xis.vectors + zetas.vectors
    worst = float(np.max(np.linalg.norm(sums @ e.T, axis=1))) if sums.size else 0.0
    if worst > 1e-8:
        raise FlipInconsistencyError(f"projection fails to kill sums: {worst:.3e}")
    return (e + dagger(e)) / 2


@dataclass
class GroupTransportResult:
    path: UnitaryPath
    terminal_error: float
    terminal_bound: float
    commutator_sup: float
    commutator_bound: float
    eps_prime: float
    folner: FolnerSet
    legs: int = 1
    extras: dict = field(default_factory=dict)


def group_state_transport(action: GroupAction, xi: np.ndarray, eta: np.ndarray,
                          gens: list, eps: float,
                          detour_hint: np.ndarray | None = None,
                          t_samples: int = 16) -> GroupTransportResult:
    """Path nearly commuting with the group action and moving xi to eta.

    Orthogonal-orbit case: one leg e^{i pi t hbar}.  Overlapping orbits
    take a detour through an intermediate vector with matching correlation
    data found in the joint orbit complement (or supplied as a hint),
    doubling the bounds.
    """
    xi = check_state(xi)
    eta = check_state(eta)
    folner = folner_set(action, gens, eps / 2)
    orbit_xi = _orbit(action, folner, xi)
    orbit_eta = _orbit(action, folner, eta)
    cross = float(np.max(np.abs(orbit_xi @ orbit_eta.conj().T)))
    if cross <= 1e-8:
        return _orthogonal_leg(action, folner, xi, eta, orbit_xi, orbit_eta,
                               gens, eps, t_samples)

    mid = _find_detour(action, folner, xi, eta, eps, detour_hint)
    orbit_mid = _orbit(action, folner, mid)
    leg1 = _orthogonal_leg(action, folner, xi, mid, orbit_xi, orbit_mid,
                           gens, eps, t_samples)
    leg2 = _orthogonal_leg(action, folner, mid, eta, orbit_mid, orbit_eta,
                           gens, eps, t_samples)
    path = concat_paths(leg1.path, leg2.path)
    terminal = float(np.linalg.norm(path.end() @ xi - eta))
    sup = 0.0
    for t in path.sample_times(t_samples):
        ut = path.at(t)
        for g in gens:
            r = action.rep(g)
            sup = max(sup, op_norm(ut @ r - r @ ut))
    return GroupTransportResult(
        path=path,
        terminal_error=terminal,
        terminal_bound=leg1.terminal_bound + leg2.terminal_bound,
        commutator_sup=sup,
        commutator_bound=2 * np.pi * eps,
        eps_prime=leg1.eps_prime,
        folner=folner,
        legs=2,
        extras={"leg_errors": [leg1.terminal_error, leg2.terminal_error]},
    )


def _orbit(action: GroupAction, folner: FolnerSet, v: np.ndarray) -> np.ndarray:
    return np.array([action.rep(g) @ v for g in folner.elements])


def _orthogonal_leg(action, folner, xi, eta, orbit_xi, orbit_eta, gens, eps,
                    t_samples) -> GroupTransportResult:
    size = len(folner.elements)
    eps_prime = eps / (2 * EXP_SERIES_CONSTANT)
    delta = eps_prime**2 / size
    corr_gap = float(np.max(np.abs(
        gram_matrix(VectorFamily(action.dim, orbit_xi))
        - gram_matrix(VectorFamily(action.dim, orbit_eta))
    )))
    if corr_gap >= delta:
        raise HypothesisError(
            f"orbit correlation gap {corr_gap:.3e} >= delta {delta:.3e}",
            measured_gap=corr_gap,
        )
    # Matched family: complete the eta-orbit, inside the orthogonal
    # complement of the xi-orbit span, to the exact Gram of the xi-orbit.
    comp = _complement_basis(orbit_xi, action.dim)
    if comp.shape[1] < size:
        raise FlipInconsistencyError(
            "orbit complement too small to host the matched family"
        )
    coords = orbit_eta @ comp.conj()
    completed = gram_complete(
        VectorFamily(comp.shape[1], coords),
        GramTarget(size, gram_matrix(VectorFamily(action.dim, orbit_xi))),
        enforce_weight=False,
    )
    zetas = completed.vectors @ comp.T
    e = flip_projection(
        VectorFamily(action.dim, orbit_xi), VectorFamily(action.dim, zetas)
    )
    hbar = average_conjugates(e, folner, action)
    path = UnitaryPath(
        [PathSegment(0.0, 1.0, np.pi * hbar, np.eye(action.dim, dtype=complex))]
    )
    ident = folner.elements.index(action.identity())
    zeta_id = zetas[ident]
    flip_error = float(np.linalg.norm(path.end() @ xi - zeta_id))
    terminal = float(np.linalg.norm(path.end() @ xi - eta))
    sup = 0.0
    for t in path.sample_times(t_samples):
        ut = path.at(t)
        for g in gens:
            r = action.rep(g)
            sup = max(sup, op_norm(ut @ r - r @ ut))
    return GroupTransportResult(
        path=path,
        terminal_error=terminal,
        terminal_bound=eps_prime * EXP_SERIES_CONSTANT + 2 * eps_prime,
        commutator_sup=sup,
        commutator_bound=np.pi * eps,
        eps_prime=eps_prime,
        folner=folner,
        legs=1,
        extras={
            "delta": delta,
            "correlation_gap": corr_gap,
            "flip_error": flip_error,
            "flip_bound": eps_prime * EXP_SERIES_CONSTANT,
        },
    )


def _complement_basis(rows: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal column basis of the orthogonal complement of the row span."""
    u, s, _ = np.linalg.svd(rows.T, full_matrices=True)
    rank = int(np.sum(s > 1e-10 * max(s[0] if s.size else 0.0, 1e-30)))
    return u[:, rank:]


def _find_detour(action: GroupAction, folner: FolnerSet, xi: np.ndarray,
                 eta: np.ndarray, eps: float,
                 hint: np.ndarray | None) -> np.ndarray:
    """Vector in the joint extended-orbit complement whose correlation data
    matches the source's; searched by seeded local minimization."""
    size = len(folner.elements)
    eps_prime = eps / (2 * EXP_SERIES_CONSTANT)
    delta = eps_prime**2 / size
    # Orthogonality of the detour orbit against both endpoints' orbits needs
    # the complement of the difference-set translates of both vectors.
    diff_elems = sorted(
        {action.multiply(action.inverse(g), h)
         for g in folner.elements for h in folner.elements}
    )
    extended = np.array(
        [action.rep(k) @ v for k in diff_elems for v in (xi, eta)]
    )
    comp = _complement_basis(extended, action.dim)
    if comp.shape[1] == 0:
        raise DetourFailureError("no room for a detour vector", best_residual=np.inf)
    targets = np.array([complex(np.vdot(xi, action.rep(k) @ xi)) for k in diff_elems])
    mats = [dagger(comp) @ action.rep(k) @ comp for k in diff_elems]

    def residual(c: np.ndarray) -> float:
        return float(max(abs(np.vdot(c, m @ c) - t) for m, t in zip(mats, targets)))

    candidates = []
    if hint is not None:
        h = np.asarray(hint, dtype=complex).reshape(-1)
        c = dagger(comp) @ h
        n = np.linalg.norm(c)
        if n > 1e-8:
            candidates.append(c / n)
    rng = np.random.default_rng(0)
    w = comp.shape[1]

    def objective(x: np.ndarray) -> float:
        c = x[:w] + 1j * x[w:]
        n = np.linalg.norm(c)
        if n < 1e-12:
            return 1e6
        c = c / n
        return float(sum(abs(np.vdot(c, m @ c) - t) ** 2
                         for m, t in zip(mats, targets)))

    for _ in range(4):
        x0 = rng.standard_normal(2 * w)
        out = scipy.optimize.minimize(objective, x0, method="L-BFGS-B",
                                      options={"maxiter": 300})
        c = out.x[:w] + 1j * out.x[w:]
        n = np.linalg.norm(c)
        if n > 1e-12:
            candidates.append(c / n)

    best, best_res = None, np.inf
    for c in candidates:
        r = residual(c)
        if r < best_res:
            best, best_res = c, r
    if best is None or best_res >= delta:
        raise DetourFailureError(
            f"best detour residual {best_res:.3e} >= delta {delta:.3e}",
            best_residual=best_res,
        )
    return comp @ best
