"""Explicit individual attacks on DPS QKD and their figures of merit.

Four eavesdropping strategies are modelled:

* minimum-error discrimination (MED) of the signal ensemble, solved as a
  semidefinite program over POVM elements;
* the optimal two-clone map, solved as a semidefinite program over the
  Choi operator of the cloning channel;
* a symmetric unitary cloning machine with a single cloning coefficient,
  optimised by scalar search;
* the intercept-resend baseline with a receiver-identical measurement.

Every SDP is assembled through the named constraint builders of
:mod:`dpsqkd.sdp`; no attack code touches raw svec index arithmetic.
Results carry confusion tables and collision probabilities that feed the
shrinking factors in :mod:`dpsqkd.keyrate`.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import sdp
from .dps import DpsEnsemble, ber_of_state, dps_ensemble
from .keyrate import AttackProfile
from .linalg import dagger, eig_hermitian, outer, partial_trace

_POVM_SUM_ATOL = 1e-8
_POVM_PSD_ATOL = 1e-9


# ---------------------------------------------------------------------------
# minimum error discrimination
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Povm:
    """A positive operator-valued measure: PSD elements that sum to identity."""

    elements: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        d = self.elements[0].shape[0]
        total = np.zeros((d, d), dtype=complex)
        for el in self.elements:
            if el.shape != (d, d):
                raise ValueError("POVM elements must share one dimension")
            if float(np.min(np.linalg.eigvalsh((el + dagger(el)) / 2))) < -_POVM_PSD_ATOL:
                raise ValueError("POVM element is not positive semidefinite")
            total = total + el
        if float(np.max(np.abs(total - np.eye(d)))) > _POVM_SUM_ATOL:
            raise ValueError("POVM elements do not sum to the identity")


@dataclass
class MedResult:
    povm: Povm
    confusion: np.ndarray  # confusion[i, j] = P(outcome j | state i)
    p_success: float
    collision_probability: float
    problem: sdp.SdpProblem
    solution: sdp.SdpSolution
    kkt: sdp.KktReport


def _as_densities(states: Sequence[np.ndarray]) -> list[np.ndarray]:
    out = []
    for s in states:
        s = np.asarray(s, dtype=complex)
        out.append(outer(s) if s.ndim == 1 else s)
    return out


def _block_names(count: int) -> list[str]:
    return [f"P{i + 1}" for i in range(count)]


def med_problem(states: Sequence[np.ndarray], priors: Sequence[float]) -> sdp.SdpProblem:
    """SDP for minimum-error discrimination: maximise sum_i p(i) <rho_i, P_i>
    over POVMs {P_i}."""
    rhos = _as_densities(states)
    d = rhos[0].shape[0]
    names = _block_names(len(rhos))
    objective = {n: priors[i] * rhos[i] for i, n in enumerate(names)}
    constraints = sdp.povm_completeness_constraints(d, names)
    return sdp.SdpProblem(blocks=[(n, d) for n in names], objective=objective,
                          constraints=constraints)


def med_attack(ensemble: DpsEnsemble | Sequence[np.ndarray],
               priors: Sequence[float] | None = None,
               bit_map: Sequence[Sequence[int]] | None = None,
               options: sdp.SolveOptions | None = None) -> MedResult:
    """Optimal minimum-error discrimination of an ensemble.

    Accepts a :class:`DpsEnsemble` or an explicit list of states (kets or
    density operators) with priors.  The optimum is certified through the
    KKT conditions before the result is returned.
    """
    if isinstance(ensemble, DpsEnsemble):
        states: Sequence[np.ndarray] = ensemble.states
        priors = ensemble.priors
        bit_map = ensemble.bit_map
    else:
        states = ensemble
        if priors is None:
            raise ValueError("explicit state lists need explicit priors")
    if abs(sum(priors) - 1.0) > 1e-9:
        raise ValueError("priors must sum to 1")

    rhos = _as_densities(states)
    problem = med_problem(rhos, priors)
    solution = sdp.solve(problem, options)
    kkt = sdp.verify_kkt(problem, solution, tol=1e-6)
    names = _block_names(len(rhos))
    elements = tuple(_project_psd(solution.x[n]) for n in names)
    povm = Povm(elements=elements)
    confusion = np.array([[float(np.real(np.trace(r @ el))) for el in elements]
                          for r in rhos])
    p_success = float(sum(priors[i] * confusion[i, i] for i in range(len(rhos))))
    p_co = (collision_probability(confusion, priors, bit_map)
            if bit_map is not None else math.nan)
    return MedResult(povm=povm, confusion=confusion, p_success=p_success,
                     collision_probability=p_co, problem=problem,
                     solution=solution, kkt=kkt)


def _project_psd(h: np.ndarray) -> np.ndarray:
    """Clip the tiny negative interior-point slack off an almost-PSD operator."""
    dec = eig_hermitian(np.asarray(h, dtype=complex))
    lam = np.clip(dec.eigenvalues, 0.0, None)
    return (dec.eigenvectors * lam) @ dagger(dec.eigenvectors)


def collision_probability(confusion: np.ndarray, priors: Sequence[float],
                          bit_map: Sequence[Sequence[int]]) -> float:
    """Average per-bit collision probability sum_{x,z} P(x|z)^2 P(z).

    ``z`` runs over measurement outcomes and ``x`` over the logical bit at a
    phase position; positions are averaged uniformly.  Posteriors follow from
    the confusion table and the priors by Bayes' rule; outcomes with zero
    probability are skipped.
    """
    confusion = np.asarray(confusion, dtype=float)
    priors = np.asarray(priors, dtype=float)
    n_states, n_outcomes = confusion.shape
    positions = len(bit_map[0])
    total = 0.0
    for pos in range(positions):
        for z in range(n_outcomes):
            p_z = float(priors @ confusion[:, z])
            if p_z <= 0.0:
                continue
            for x in (0, 1):
                p_xz = sum(priors[i] * confusion[i, z] for i in range(n_states)
                           if bit_map[i][pos] == x) / p_z
                total += p_xz ** 2 * p_z / positions
    return total


def pgm_povm(states: Sequence[np.ndarray], priors: Sequence[float]) -> Povm:
    """Square-root ("pretty good") measurement of an ensemble.

    P_i = S^{-1/2} p_i rho_i S^{-1/2} with S the average state; for the
    symmetric DPS ensembles this measurement attains the minimum-error
    optimum, which makes it an independent check on the SDP route.
    """
    rhos = _as_densities(states)
    d = rhos[0].shape[0]
    s = sum(priors[i] * rhos[i] for i in range(len(rhos)))
    dec = eig_hermitian(s)
    inv_sqrt = np.zeros((d, d), dtype=complex)
    for k in range(d):
        if dec.eigenvalues[k] > 1e-12:
            v = dec.eigenvectors[:, k]
            inv_sqrt += np.outer(v, v.conj()) / np.sqrt(dec.eigenvalues[k])
    elements = [inv_sqrt @ (priors[i] * rhos[i]) @ inv_sqrt for i in range(len(rhos))]
    # on a rank-deficient average state, spread the kernel evenly to complete the POVM
    kernel = np.eye(d, dtype=complex) - sum(elements)
    if float(np.max(np.abs(kernel))) > _POVM_SUM_ATOL:
        elements = [el + kernel / len(elements) for el in elements]
    return Povm(elements=tuple(elements))


def povm_success(povm: Povm, states: Sequence[np.ndarray],
                 priors: Sequence[float]) -> float:
    rhos = _as_densities(states)
    return float(sum(priors[i] * np.real(np.trace(rhos[i] @ povm.elements[i]))
                     for i in range(len(rhos))))


def holevo_certificate(states: Sequence[np.ndarray], priors: Sequence[float],
                       povm: Povm, atol: float = 1e-6) -> bool:
    """Helstrom optimality witness: Y = sum_i p_i rho_i P_i is Hermitian and
    Y - p_j rho_j is PSD for every j."""
    rhos = _as_densities(states)
    y = sum(priors[i] * rhos[i] @ povm.elements[i] for i in range(len(rhos)))
    if float(np.max(np.abs(y - dagger(y)))) > atol:
        return False
    y = (y + dagger(y)) / 2
    return all(
        float(np.min(np.linalg.eigvalsh(y - priors[j] * rhos[j]))) >= -atol
        for j in range(len(rhos))
    )


# ---------------------------------------------------------------------------
# optimal map-based cloning
# ---------------------------------------------------------------------------

CHOI_BLOCK = "J"


@dataclass
class CloningResult:
    """Choi operator of the optimal symmetric cloner and derived quantities.

    The Choi operator lives on (bob-out) x (input) x (eve-out) with the input
    factor in the middle; trace preservation reads Tr_{out,out}(J) = I_in.
    """

    choi: np.ndarray
    avg_two_copy_fidelity: float
    per_state_clone_fidelity: list[float]
    bob_states: list[np.ndarray]
    eve_states: list[np.ndarray]
    problem: sdp.SdpProblem
    solution: sdp.SdpSolution
    kkt: sdp.KktReport


def cloning_problem(states: Sequence[np.ndarray],
                    priors: Sequence[float]) -> sdp.SdpProblem:
    """SDP for the optimal symmetric cloner in the Choi representation.

    Maximises the prior-averaged two-copy fidelity <psi psi| Phi(psi)|psi psi>
    over completely positive trace-preserving maps Phi.
    """
    d = np.asarray(states[0]).size
    q = np.zeros((d ** 3, d ** 3), dtype=complex)
    for i, s in enumerate(states):
        s = np.asarray(s, dtype=complex)
        v = np.kron(s, np.kron(s.conj(), s))  # conjugate sits on the input factor
        q += priors[i] * np.outer(v, v.conj())
    constraints = sdp.partial_trace_identity_constraints(CHOI_BLOCK, [d, d, d], keep=1)
    return sdp.SdpProblem(blocks=[(CHOI_BLOCK, d ** 3)], objective={CHOI_BLOCK: q},
                          constraints=constraints)


def apply_choi(choi: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """Joint (bob, eve) output state of the cloning channel on input ``rho``."""
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[0]
    sandwich = choi @ np.kron(np.eye(d), np.kron(rho.T, np.eye(d)))
    return partial_trace(sandwich, [d, d, d], keep=[0, 2])


def optimal_cloner(ensemble: DpsEnsemble | Sequence[np.ndarray],
                   priors: Sequence[float] | None = None,
                   options: sdp.SolveOptions | None = None) -> CloningResult:
    """Solve for the optimal symmetric cloning channel of a pure-state ensemble."""
    if isinstance(ensemble, DpsEnsemble):
        states: Sequence[np.ndarray] = ensemble.states
        priors = ensemble.priors
    else:
        states = ensemble
        if priors is None:
            raise ValueError("explicit state lists need explicit priors")
    d = np.asarray(states[0]).size
    problem = cloning_problem(states, priors)
    solution = sdp.solve(problem, options)
    kkt = sdp.verify_kkt(problem, solution, tol=1e-6)
    choi = _project_psd(solution.x[CHOI_BLOCK])

    bob_states, eve_states, fids = [], [], []
    two_copy = 0.0
    for i, s in enumerate(states):
        s = np.asarray(s, dtype=complex)
        joint = apply_choi(choi, outer(s))
        bob = partial_trace(joint, [d, d], keep=[0])
        eve = partial_trace(joint, [d, d], keep=[1])
        bob_states.append(bob)
        eve_states.append(eve)
        fids.append(float(np.real(s.conj() @ bob @ s)))
        pair = np.kron(s, s)
        two_copy += priors[i] * float(np.real(pair.conj() @ joint @ pair))
    return CloningResult(
        choi=choi, avg_two_copy_fidelity=two_copy,
        per_state_clone_fidelity=fids, bob_states=bob_states,
        eve_states=eve_states, problem=problem, solution=solution, kkt=kkt,
    )


def cptp_residuals(choi: np.ndarray, d: int) -> tuple[float, float]:
    """(negativity, trace-preservation residual) of a Choi operator on
    (out) x (in) x (out)."""
    neg = max(0.0, -float(np.min(np.linalg.eigvalsh((choi + dagger(choi)) / 2))))
    marginal = partial_trace(choi, [d, d, d], keep=[1])
    tp = float(np.max(np.abs(marginal - np.eye(d))))
    return neg, tp


def depolarizing_fit(original: np.ndarray, cloned: np.ndarray) -> tuple[float, float]:
    """Least-squares fit of cloned ~ (1-p) original + (p/d) I.

    Returns the fitted p and the Frobenius residual of the fit.
    """
    original = np.asarray(original, dtype=complex)
    cloned = np.asarray(cloned, dtype=complex)
    if original.shape != cloned.shape:
        raise ValueError("operators must share a dimension")
    d = original.shape[0]
    a = original - np.eye(d) / d
    b = cloned - np.eye(d) / d
    denom = float(np.real(np.trace(dagger(a) @ a)))
    if denom <= 1e-15:
        # original already maximally mixed: any p fits, residual is direct
        return 0.0, float(np.linalg.norm(cloned - original))
    p = 1.0 - float(np.real(np.trace(dagger(a) @ b))) / denom
    resid = float(np.linalg.norm(cloned - ((1.0 - p) * original + p / d * np.eye(d))))
    return p, resid


# ---------------------------------------------------------------------------
# unitary symmetric cloner
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UnitaryClonerParams:
    """Symmetric cloning isometry on basis kets {e_i}:

        |e_i>|0>|X>  ->  p |e_i>|e_i>|X_i>
                         + q sum_{j != i} (|e_i>|e_j> + |e_j>|e_i>) |X_j>,

    with p**2 + 2(d-1) q**2 = 1 fixing p from q (unitarity).  The machine
    register states X_j are orthonormal labels and never materialise.
    """

    d: int
    q: float
    basis: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        if not 0.0 <= self.q <= 1.0 / math.sqrt(2.0 * (self.d - 1)):
            raise ValueError("cloning coefficient out of the unitary range")
        if len(self.basis) != self.d:
            raise ValueError("basis must contain d kets")
        gram = np.array([[complex(np.vdot(a, b)) for b in self.basis] for a in self.basis])
        if float(np.max(np.abs(gram - np.eye(self.d)))) > 1e-10:
            raise ValueError("basis is not orthonormal")

    @property
    def p(self) -> float:
        return math.sqrt(max(0.0, 1.0 - 2.0 * (self.d - 1) * self.q ** 2))

    def unitarity_residual(self) -> float:
        return abs(self.p ** 2 + 2.0 * (self.d - 1) * self.q ** 2 - 1.0)


def aligned_cloning_basis(ensemble: DpsEnsemble) -> tuple[np.ndarray, ...]:
    """Orthonormal basis whose first vector is the all-plus ensemble state.

    Aligning the basis with one ensemble state maximises the fourth powers of
    the expansion coefficients, which is where the symmetric cloner performs
    best.  The remaining vectors complete the basis by Gram-Schmidt and are
    sign-normalised so the first non-zero component is positive.
    """
    vecs = [np.asarray(ensemble.states[0], dtype=complex)]
    n = ensemble.n
    for cand_idx in range(n - 1, -1, -1):
        if len(vecs) == n:
            break
        cand = np.zeros(n, dtype=complex)
        cand[cand_idx] = 1.0
        for v in vecs:
            cand = cand - np.vdot(v, cand) * v
        nrm = np.linalg.norm(cand)
        if nrm < 1e-9:
            continue
        cand = cand / nrm
        first = cand[np.argmax(np.abs(cand) > 1e-12)]
        if abs(first) > 1e-12 and first.real < 0:
            cand = -cand
        vecs.append(cand)
    return tuple(vecs)


def unitary_cloner_output(params: UnitaryClonerParams, psi: np.ndarray) -> np.ndarray:
    """Joint (bob, eve) state after the cloning isometry, machine traced out."""
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-9:
        raise ValueError("input ket must be normalised")
    d, q, p = params.d, params.q, params.p
    coeffs = np.array([complex(np.vdot(b, psi)) for b in params.basis])
    rho_ab = np.zeros((d * d, d * d), dtype=complex)
    for j in range(d):
        branch = coeffs[j] * p * np.kron(params.basis[j], params.basis[j])
        for i in range(d):
            if i != j:
                branch = branch + q * coeffs[i] * (
                    np.kron(params.basis[i], params.basis[j])
                    + np.kron(params.basis[j], params.basis[i]))
        rho_ab += np.outer(branch, branch.conj())
    return rho_ab


def apply_unitary_cloner(params: UnitaryClonerParams,
                         psi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """(bob_state, eve_state) reduced density operators of the two clones."""
    rho_ab = unitary_cloner_output(params, psi)
    d = params.d
    bob = partial_trace(rho_ab, [d, d], keep=[0])
    eve = partial_trace(rho_ab, [d, d], keep=[1])
    return bob, eve


def _unitary_avg_fidelity(q: float, states: Sequence[np.ndarray],
                          priors: Sequence[float],
                          basis: tuple[np.ndarray, ...]) -> float:
    params = UnitaryClonerParams(d=len(basis), q=q, basis=basis)
    total = 0.0
    for i, s in enumerate(states):
        s = np.asarray(s, dtype=complex)
        bob, _ = apply_unitary_cloner(params, s)
        total += priors[i] * float(np.real(s.conj() @ bob @ s))
    return total


_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def optimize_unitary_q(ensemble: DpsEnsemble | Sequence[np.ndarray],
                       basis: tuple[np.ndarray, ...] | None = None,
                       priors: Sequence[float] | None = None,
                       tol: float = 1e-6) -> tuple[float, float]:
    """Golden-section maximisation of the mean single-clone fidelity over q.

    Returns (q_opt, avg_fidelity).  The search interval is the full unitary
    range [0, 1/sqrt(2(d-1))].
    """
    if isinstance(ensemble, DpsEnsemble):
        states: Sequence[np.ndarray] = ensemble.states
        priors = ensemble.priors
        if basis is None:
            basis = aligned_cloning_basis(ensemble)
    else:
        states = ensemble
        if priors is None or basis is None:
            raise ValueError("explicit state lists need explicit priors and basis")
    d = len(basis)
    lo, hi = 0.0, 1.0 / math.sqrt(2.0 * (d - 1))
    c1 = hi - _GOLDEN * (hi - lo)
    c2 = lo + _GOLDEN * (hi - lo)
    f1 = _unitary_avg_fidelity(c1, states, priors, basis)
    f2 = _unitary_avg_fidelity(c2, states, priors, basis)
    while hi - lo > tol:
        if f1 < f2:
            lo, c1, f1 = c1, c2, f2
            c2 = lo + _GOLDEN * (hi - lo)
            f2 = _unitary_avg_fidelity(c2, states, priors, basis)
        else:
            hi, c2, f2 = c2, c1, f1
            c1 = hi - _GOLDEN * (hi - lo)
            f1 = _unitary_avg_fidelity(c1, states, priors, basis)
    q_opt = (lo + hi) / 2.0
    return q_opt, _unitary_avg_fidelity(q_opt, states, priors, basis)


# ---------------------------------------------------------------------------
# post-cloning discrimination and attack profiles
# ---------------------------------------------------------------------------

def med_on_cloned(eve_states: Sequence[np.ndarray], priors: Sequence[float],
                  bit_map: Sequence[Sequence[int]] | None = None,
                  options: sdp.SolveOptions | None = None) -> MedResult:
    """Minimum-error discrimination of the (generally mixed) clone ensemble."""
    for rho in eve_states:
        rho = np.asarray(rho, dtype=complex)
        if float(np.min(np.linalg.eigvalsh((rho + dagger(rho)) / 2))) < -1e-7:
            raise ValueError("clone states must be valid density operators")
    return med_attack(list(eve_states), priors=priors, bit_map=bit_map,
                      options=options)


def intercept_fraction(p_error_per_intercept: float, e_b: float) -> float:
    """Largest interceptable fraction hiding inside error rate ``e_b``."""
    if p_error_per_intercept <= 0.0 or p_error_per_intercept > 1.0:
        raise ValueError("error per intercept must lie in (0, 1]")
    if e_b < 0.0:
        raise ValueError("error rate must be non-negative")
    return min(e_b / p_error_per_intercept, 1.0)


IR_ERROR = 1.0 / 3.0
IR_COLLISION = 0.75


def ir_attack_profile() -> AttackProfile:
    """Intercept-resend with a receiver-identical interferometer.

    Each intercepted frame gives Eve one definite phase-difference bit; a key
    bit later detected from an attacked frame matches Eve's known position
    with probability 1/2, so her per-attacked-bit collision probability is
    (1/2)*1 + (1/2)*(1/2) = 3/4, and resending disturbs one bit in three.
    """
    return AttackProfile(name="ir", per_intercept_error=IR_ERROR,
                         per_attacked_bit_collision=IR_COLLISION)


def ir_monte_carlo_collision(samples: int, seed: int = 7, n: int = 3,
                             mode: str = "definite") -> float:
    """Monte-Carlo estimate of the per-attacked-bit collision probability.

    ``definite`` assumes Eve always learns one uniformly chosen phase
    position per intercepted frame (the model behind
    :func:`ir_attack_profile`).  ``mzi`` gives her the physical
    interferometer instead, whose boundary slots teach her nothing with
    probability 1/n, lowering the average collision probability.
    """
    rng = np.random.default_rng(seed)
    positions = n - 1
    eve_pos = rng.integers(0, positions, size=samples)
    bob_pos = rng.integers(0, positions, size=samples)
    collision = np.where(eve_pos == bob_pos, 1.0, 0.5)
    if mode == "mzi":
        learned = rng.random(samples) < (positions / n)
        collision = np.where(learned, collision, 0.5)
    elif mode != "definite":
        raise ValueError(f"unknown mode {mode!r}")
    return float(np.mean(collision))


def standard_attack_profiles(n: int = 3,
                             options: sdp.SolveOptions | None = None
                             ) -> dict[str, AttackProfile]:
    """The four explicit attacks as key-rate profiles, computed from scratch.

    MED uses the state-level error probability 1 - p_success per intercepted
    frame.  The cloning attacks disturb every frame they touch, so their
    error budget is the detection-conditioned bit error rate of the cloned
    states, and Eve's collision probability comes from discriminating her
    clones.
    """
    ens = dps_ensemble(n)
    med = med_attack(ens, options=options)
    profiles = {
        "ir": ir_attack_profile(),
        "med": AttackProfile(
            name="med",
            per_intercept_error=1.0 - med.p_success,
            per_attacked_bit_collision=med.collision_probability,
        ),
    }

    clone = optimal_cloner(ens, options=options)
    clone_med = med_on_cloned(clone.eve_states, ens.priors, ens.bit_map,
                              options=options)
    ber_clone = float(np.mean([
        ber_of_state(clone.bob_states[i], i, ens, conditional=True)
        for i in range(len(ens.states))
    ]))
    profiles["cloning"] = AttackProfile(
        name="cloning", per_intercept_error=ber_clone,
        per_attacked_bit_collision=clone_med.collision_probability,
    )

    basis = aligned_cloning_basis(ens)
    q_opt, _ = optimize_unitary_q(ens, basis)
    params = UnitaryClonerParams(d=n, q=q_opt, basis=basis)
    ustates = [apply_unitary_cloner(params, s)[0] for s in ens.states]
    unitary_med = med_on_cloned(ustates, ens.priors, ens.bit_map, options=options)
    ber_unitary = float(np.mean([
        ber_of_state(ustates[i], i, ens, conditional=True)
        for i in range(len(ens.states))
    ]))
    profiles["unitary"] = AttackProfile(
        name="unitary", per_intercept_error=ber_unitary,
        per_attacked_bit_collision=unitary_med.collision_probability,
    )
    return profiles


# ---------------------------------------------------------------------------
# serialisation
# ---------------------------------------------------------------------------

def _complex_matrix_json(m: np.ndarray) -> list[list[list[float]]]:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(m, dtype=complex)]


def med_result_json(result: MedResult) -> str:
    """Regression-friendly JSON snapshot of a discrimination result."""
    doc = {
        "p_success": result.p_success,
        "collision_probability": result.collision_probability,
        "confusion": [[float(v) for v in row] for row in result.confusion],
        "povm": [_complex_matrix_json(el) for el in result.povm.elements],
        "kkt_passed": result.kkt.passed,
    }
    return json.dumps(doc, sort_keys=True)


def cloning_result_json(result: CloningResult) -> str:
    """Regression-friendly JSON snapshot of a cloning result (states, fidelities)."""
    doc = {
        "avg_two_copy_fidelity": result.avg_two_copy_fidelity,
        "per_state_clone_fidelity": list(result.per_state_clone_fidelity),
        "bob_states": [_complex_matrix_json(b) for b in result.bob_states],
        "kkt_passed": result.kkt.passed,
    }
    return json.dumps(doc, sort_keys=True)
