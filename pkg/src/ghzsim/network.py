"""Entanglement swapping over remote spins through the photonic analyzer.

A hub node holds one photon from each of two or three hybrid spin-photon
pairs (|up,H> + |down,V>)/sqrt(2) shared with remote stationary qubits. The
photons are fed one at a time into the analyzer; conditioning on the click
record and the final QD readout projects the remote spins onto a Bell state
(two pairs) or a GHZ state (three pairs) that the click record predicts.

State layout for m pairs: axes 0..m-1 are the remote spins, axes m..2m-1 the
photons, axis 2m is QD1 and axis 2m+1 is QD2. Branch amplitudes stay
unnormalized; detected photon slots stay collapsed on the recorded
polarization so that summing branch vectors rebuilds the unmeasured state.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._ops import KET_MINUS, KET_PLUS, kron_all, norm2
from .circuit import (AnalyzerConfig, OutcomeRecord, PhotonFate, _photon_step,
                      _qd_readouts, _with_fate, classify)
from .states import GhzLabel, QubitRegister

SQRT_HALF = 1.0 / np.sqrt(2.0)


def hybrid_pair_state() -> np.ndarray:
    """Joint (spin, photon) vector (|up,H> + |down,V>)/sqrt(2)."""
    v = np.zeros(4, dtype=complex)
    v[0b00] = v[0b11] = SQRT_HALF
    return v


@dataclass(frozen=True)
class HybridPair:
    """Wiring of one entanglement pair: remote spin axis and photon axis."""

    spin: int
    photon: int


@dataclass(eq=False)
class NetworkBranch:
    """One unnormalized branch: per-photon click so far (None = not fed yet)."""

    clicks: tuple
    amps: np.ndarray | None
    weight: float = 0.0

    def __post_init__(self):
        if self.amps is not None:
            self.weight = norm2(self.amps)


@dataclass(eq=False)
class NetworkState:
    """All branches of the hub-plus-remote-spins system."""

    num_pairs: int
    branches: list

    @property
    def num_qubits(self) -> int:
        return 2 * self.num_pairs + 2

    @property
    def pairs(self) -> tuple[HybridPair, ...]:
        m = self.num_pairs
        return tuple(HybridPair(spin=i, photon=m + i) for i in range(m))

    @property
    def qd_axes(self) -> tuple[int, int]:
        return (2 * self.num_pairs, 2 * self.num_pairs + 1)

    @property
    def fed(self) -> tuple[bool, ...]:
        return tuple(c is not None for c in self.branches[0].clicks)

    def assembled(self) -> np.ndarray:
        """Sum of live branch vectors: the state before any projection."""
        out = None
        for br in self.branches:
            if br.amps is not None:
                out = br.amps.copy() if out is None else out + br.amps
        if out is None:
            raise ValueError("no live branches to assemble")
        return out


def make_network(num_pairs: int) -> NetworkState:
    """Product of hybrid pairs with both analyzer QDs prepared in |+>."""
    if num_pairs not in (2, 3):
        raise ValueError("num_pairs must be 2 or 3")
    m = num_pairs
    interleaved = kron_all(*([hybrid_pair_state()] * m))  # axes s1,p1,s2,p2,...
    t = interleaved.reshape([2] * (2 * m))
    perm = [2 * i for i in range(m)] + [2 * i + 1 for i in range(m)]
    spins_first = np.transpose(t, perm).reshape(-1)
    amps = kron_all(spins_first, KET_PLUS, KET_PLUS)
    return NetworkState(num_pairs=m, branches=[NetworkBranch((None,) * m, amps)])


def _require_monochromatic(config: AnalyzerConfig) -> None:
    if config.spectrum is not None:
        raise ValueError("network runs are monochromatic; use a fixed omega")


def feed_photon(state: NetworkState, photon: int, config: AnalyzerConfig) -> NetworkState:
    """Send one hub photon through the analyzer, branching on its click."""
    if not 0 <= photon < state.num_pairs:
        raise ValueError(f"photon index {photon} out of range")
    if state.fed[photon]:
        raise ValueError(f"photon {photon} was already fed")
    _require_monochromatic(config)
    refl1, refl2 = config.reflection_pairs()
    nq = state.num_qubits
    photon_axis = state.num_pairs + photon
    out: list[NetworkBranch] = []
    for br in state.branches:
        if br.amps is None:
            # branch already dead: the photon still enters the apparatus but
            # nothing about it is tracked, so it is booked as lost too
            out.append(NetworkBranch(_with_fate(br.clicks, photon, PhotonFate.LOST),
                                     None, weight=br.weight))
            continue
        stepped, lost = _photon_step(br.amps, nq, br.clicks, photon, photon_axis,
                                     state.qd_axes, refl1, refl2, config.eta0)
        for clicks, amps in stepped:
            out.append(NetworkBranch(clicks, amps))
        if lost > 0.0:
            out.append(NetworkBranch(_with_fate(br.clicks, photon, PhotonFate.LOST),
                                     None, weight=lost))
    return NetworkState(num_pairs=state.num_pairs, branches=out)


@dataclass(frozen=True)
class SwapOutcome:
    """One heralded swap result.

    clicks covers the fed photons in feeding order. For conclusive outcomes
    the remote spins collapse onto `remote_state` and `predicted` is the
    label inferred from the click record alone; inconclusive branches are
    aborted with no QD measurement attached.
    """

    clicks: tuple
    qd_readout: tuple[str, str] | None
    probability: float
    remote_state: QubitRegister | None
    predicted: GhzLabel | None


def _contract_axis(t: np.ndarray, axis: int, vec: np.ndarray) -> np.ndarray:
    """<vec| applied to one axis; remaining axes keep their order."""
    return np.tensordot(vec.conj(), t, axes=([0], [axis]))


def _factor_out_unfed_pairs(state: NetworkState):
    """Contract untouched pairs out of every live branch.

    Returns (list of (clicks-of-fed, amps, lost_weight) with reduced layout,
    fed photon indices). Raises if a supposedly untouched pair turns out to
    be entangled with the rest.
    """
    fed = [i for i, used in enumerate(state.fed) if used]
    unfed = [i for i in range(state.num_pairs) if i not in fed]
    m0 = state.num_pairs
    reduced = []
    for br in state.branches:
        clicks = tuple(br.clicks[i] for i in fed)
        if br.amps is None:
            reduced.append((clicks, None, br.weight))
            continue
        t = br.amps.reshape([2] * state.num_qubits)
        axes = list(range(state.num_qubits))  # original axis ids still present
        for i in unfed:
            tt = np.moveaxis(t, (axes.index(i), axes.index(m0 + i)), (0, 1))
            rest = (tt[0, 0] + tt[1, 1]) * SQRT_HALF
            recon = np.zeros_like(tt)
            recon[0, 0] = rest * SQRT_HALF
            recon[1, 1] = rest * SQRT_HALF
            if norm2(tt - recon) > 1e-12 * max(1.0, norm2(t)):
                raise ValueError(f"pair {i} is no longer a product factor")
            t = rest
            axes.remove(i)
            axes.remove(m0 + i)
        reduced.append((clicks, t.reshape(-1), None))
    return reduced, fed


def _swap_outcomes(state: NetworkState, expect_fed: int) -> list[SwapOutcome]:
    fed_count = sum(state.fed)
    if fed_count != expect_fed:
        raise ValueError(f"swap needs exactly {expect_fed} fed photons, got {fed_count}")
    reduced, fed = _factor_out_unfed_pairs(state)
    m = len(fed)
    nq = 2 * m + 2  # fed spins + fed photons + two QDs
    qd_axes = (2 * m, 2 * m + 1)
    outcomes: list[SwapOutcome] = []
    aborted: dict = {}  # distinct error branches can share a click record
    for clicks, amps, lost_weight in reduced:
        if amps is None:
            aborted[clicks] = aborted.get(clicks, 0.0) + lost_weight
            continue
        if any(c not in (PhotonFate.D1, PhotonFate.D2) for c in clicks):
            aborted[clicks] = aborted.get(clicks, 0.0) + norm2(amps)
            continue
        for qd_pair, proj, w in _qd_readouts(amps, nq, qd_axes):
            t = proj.reshape([2] * nq)
            for axis, ket in ((qd_axes[1], _QD_KETS[qd_pair[1]]),
                              (qd_axes[0], _QD_KETS[qd_pair[0]])):
                t = _contract_axis(t, axis, ket)
            for j in reversed(range(m)):  # photon axes, highest first
                bit = 0 if clicks[j] is PhotonFate.D1 else 1
                basis = np.zeros(2, dtype=complex)
                basis[bit] = 1.0
                t = _contract_axis(t, m + j, basis)
            vec = t.reshape(-1)
            remote = QubitRegister(m, vec / np.sqrt(norm2(vec)))
            predicted = classify(OutcomeRecord(clicks, qd_pair, w), m)
            outcomes.append(SwapOutcome(clicks, qd_pair, w, remote, predicted))
    outcomes.extend(SwapOutcome(clicks, None, p, None, None)
                    for clicks, p in aborted.items())
    return sorted(outcomes, key=lambda o: (tuple(c.value for c in o.clicks),
                                           o.qd_readout or ()))


_QD_KETS = {"+": KET_PLUS, "-": KET_MINUS}


def bell_swap(state: NetworkState) -> list[SwapOutcome]:
    """Measure the QDs after two fed photons; remote pair collapses to a Bell state."""
    return _swap_outcomes(state, expect_fed=2)


def ghz_swap(state: NetworkState) -> list[SwapOutcome]:
    """Measure the QDs after three fed photons; remote triple collapses to a GHZ state."""
    if state.num_pairs != 3:
        raise ValueError("ghz_swap needs a three-pair network")
    return _swap_outcomes(state, expect_fed=3)
