"""Generator construction for each transport scenario.

State labels: the measured system is empty (a), occupies the first dot
(b) or the second dot (c); primed labels mark the same configuration with
the detector dot occupied.  The single-dot scenario has no c states.

Every multi-term matrix entry is assembled with math.fsum, which returns
the correctly rounded sum regardless of term order.  The rule-driven
builder therefore reproduces the hand-coded coupled-dot generator bit for
bit, not merely within rounding.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from math import fsum

import numpy as np

from .model import Generator, IndexMap, RateSet

SINGLE_DOT_SET = "single_dot_set"
DOUBLE_DOT_BARE = "double_dot_bare"
DOUBLE_DOT_SET = "double_dot_set"
REDUCED_DOUBLE_DOT = "reduced_double_dot"
GENERALIZED_DOUBLE_DOT_SET = "generalized_double_dot_set"

SCENARIOS = (
    SINGLE_DOT_SET,
    DOUBLE_DOT_BARE,
    DOUBLE_DOT_SET,
    REDUCED_DOUBLE_DOT,
    GENERALIZED_DOUBLE_DOT_SET,
)


def index_single_dot_set() -> IndexMap:
    return IndexMap(("a", "b", "a'", "b'"))


def index_double_dot() -> IndexMap:
    return IndexMap(("a", "b", "c"), (("b", "c"),))


def index_double_dot_set() -> IndexMap:
    return IndexMap(("a", "a'", "b", "b'", "c", "c'"), (("b", "c"), ("b'", "c'")))


@dataclass(frozen=True)
class BlockingConfig:
    """Which system configurations block the detector entry channel.

    blocked_when_dot1 / blocked_when_dot2: an electron in that dot lifts
    the detector level above the left detector Fermi level, so nothing can
    enter the detector.  backflow_when_blocked: a detector electron that
    is already inside while the configuration is blocked sits above that
    Fermi level and may also leave back to the left reservoir at gamma_L.
    """

    blocked_when_dot1: bool
    blocked_when_dot2: bool
    backflow_when_blocked: bool = True

    @classmethod
    def blocked_on_second_dot(cls) -> "BlockingConfig":
        """Detector resolves the second dot only (entry open for dot 1)."""
        return cls(False, True, True)

    @classmethod
    def blocked_on_either_dot(cls) -> "BlockingConfig":
        """Detector entry shuts for either dot; it cannot tell them apart."""
        return cls(True, True, True)

    @classmethod
    def unrestricted(cls) -> "BlockingConfig":
        """Entry open regardless of the system state.

        Extrapolated configuration: not validated against any closed-form
        result, kept out of the validation suite.
        """
        return cls(False, False, True)


def _require_equal_amplitudes(r: RateSet, what: str):
    if not r.is_equal_amplitudes:
        raise ValueError(
            f"{what} assumes equal tunneling amplitudes; primed widths must equal unprimed ones")


def build_single_dot_set(r: RateSet) -> Generator:
    """Detector dot plus a single-level measured dot, diagonal sector only.

    The four occupation probabilities close on themselves: there are no
    isolated-state transitions, hence no coherence slots at all.  The
    detector entry channel is blocked while the system dot is occupied, so
    the b' state is reached only through the system channel and drains
    both ways (gamma'_L backflow plus gamma'_R collector exit).
    """
    idx = index_single_dot_set()
    a, b, ap, bp = range(4)
    g = np.zeros((4, 4))

    g[a, a] = -fsum((r.gamma_L, r.Gamma_L))
    g[a, b] = r.Gamma_R
    g[a, ap] = r.gamma_R

    g[b, a] = r.Gamma_L
    g[b, b] = -r.Gamma_R
    g[b, bp] = fsum((r.gamma_L_p, r.gamma_R_p))

    g[ap, a] = r.gamma_L
    g[ap, ap] = -fsum((r.gamma_R, r.Gamma_L_p))
    g[ap, bp] = r.Gamma_R_p

    g[bp, ap] = r.Gamma_L_p
    g[bp, bp] = -fsum((r.gamma_L_p, r.gamma_R_p, r.Gamma_R_p))

    return Generator(g, idx, SINGLE_DOT_SET)


def _bloch_double_dot(r: RateSet, coherence_decay: float, label: str) -> Generator:
    """Three occupations plus one coherence pair for the coupled dots.

    Layout [a, b, c, Re, Im].  The hopping enters the populations through
    the imaginary part only (i*Omega*(sigma_bc - sigma_cb) = -2*Omega*Im),
    while the detuning rotates (Re, Im) into each other.
    """
    idx = index_double_dot()
    a, b, c, u, v = range(5)
    g = np.zeros((5, 5))

    g[a, a] = -r.Gamma_L
    g[a, c] = r.Gamma_R

    g[b, a] = r.Gamma_L
    g[b, v] = -2.0 * r.Omega

    g[c, c] = -r.Gamma_R
    g[c, v] = 2.0 * r.Omega

    g[u, u] = -coherence_decay
    g[u, v] = -r.epsilon

    g[v, b] = r.Omega
    g[v, c] = -r.Omega
    g[v, u] = r.epsilon
    g[v, v] = -coherence_decay

    return Generator(g, idx, label)


def build_double_dot_bare(r: RateSet) -> Generator:
    """Coupled dots without a detector.

    The coherence decays at Gamma_R/2: half the total decay rate of its
    two member states (b cannot decay, c drains to the collector).
    """
    return _bloch_double_dot(r, r.Gamma_R / 2.0, DOUBLE_DOT_BARE)


def build_reduced_double_dot(r: RateSet) -> Generator:
    """Coupled dots with the fast detector folded into pure dephasing.

    Identical to the bare generator except the coherence decay picks up
    gamma_L/2: merely opening the detector entry channel for one of the
    two dots dephases the superposition, even though the detector is
    occupied for a vanishing fraction of the time.
    """
    return _bloch_double_dot(r, fsum((r.Gamma_R, r.gamma_L)) / 2.0, REDUCED_DOUBLE_DOT)


def build_double_dot_set(r: RateSet) -> Generator:
    """Coupled dots monitored by the detector, entry blocked by dot 2 only.

    Requires equal amplitudes (primed widths equal to unprimed); the fully
    independent-width variant of this scenario is not defined.  Layout
    [a, a', b, b', c, c', Re, Im, Re', Im'].  Notable structure:

    * c' drains both through the system channel (Gamma_R) and through the
      detector leaving either way (gamma_L + gamma_R), since its detector
      electron sits above the left Fermi level;
    * the primed coherence feeds the unprimed one at gamma_R, the shared
      collector-exit channel of b' and c';
    * the primed coherence rotates at the shifted detuning
      epsilon - U1 + U2 and decays at (gamma_L + 2*gamma_R + Gamma_R)/2.
    """
    _require_equal_amplitudes(r, "the monitored coupled-dot scenario")
    idx = index_double_dot_set()
    a, ap, b, bp, c, cp, u, v, up, vp = range(10)
    g = np.zeros((10, 10))

    g[a, a] = -fsum((r.Gamma_L, r.gamma_L))
    g[a, ap] = r.gamma_R
    g[a, c] = r.Gamma_R

    g[ap, a] = r.gamma_L
    g[ap, ap] = -fsum((r.Gamma_L, r.gamma_R))
    g[ap, cp] = r.Gamma_R

    g[b, a] = r.Gamma_L
    g[b, b] = -r.gamma_L
    g[b, bp] = r.gamma_R
    g[b, v] = -2.0 * r.Omega

    g[bp, ap] = r.Gamma_L
    g[bp, b] = r.gamma_L
    g[bp, bp] = -r.gamma_R
    g[bp, vp] = -2.0 * r.Omega

    g[c, c] = -r.Gamma_R
    g[c, cp] = fsum((r.gamma_L, r.gamma_R))
    g[c, v] = 2.0 * r.Omega

    g[cp, cp] = -fsum((r.Gamma_R, r.gamma_L, r.gamma_R))
    g[cp, vp] = 2.0 * r.Omega

    decay = fsum((r.Gamma_R, r.gamma_L)) / 2.0
    g[u, u] = -decay
    g[u, v] = -r.epsilon
    g[u, up] = r.gamma_R

    g[v, b] = r.Omega
    g[v, c] = -r.Omega
    g[v, u] = r.epsilon
    g[v, v] = -decay
    g[v, vp] = r.gamma_R

    decay_p = fsum((r.gamma_L, r.gamma_R, r.gamma_R, r.Gamma_R)) / 2.0
    shift = fsum((r.epsilon, -r.U1, r.U2))
    g[up, up] = -decay_p
    g[up, vp] = -shift

    g[vp, bp] = r.Omega
    g[vp, cp] = -r.Omega
    g[vp, up] = shift
    g[vp, vp] = -decay_p

    return Generator(g, idx, DOUBLE_DOT_SET)


# occupancy of the measured system in each unprimed configuration
_OCCUPIED_DOT = {"a": None, "b": 1, "c": 2}


def build_generalized_double_dot_set(r: RateSet, cfg: BlockingConfig) -> Generator:
    """Coupled dots plus detector with configurable entry blocking.

    Assembly rules:

    1. the detector entry channel (gamma_L, unprimed state s to s')
       exists unless s's dot occupancy blocks the detector;
    2. a primed state whose configuration is blocked holds its detector
       electron above the left Fermi level, so with backflow enabled it
       decays back at gamma_L on top of the collector exit gamma_R;
    3. each coherence decays at half the sum of all decay rates of its two
       member states;
    4. a detector-exit channel present for both members of the primed pair
       preserves the system superposition and feeds the unprimed coherence
       at its rate (collector exits always qualify, backflow only when
       both members are blocked).

    With entry blocked by the second dot only this reproduces
    build_double_dot_set exactly, entry for entry.  Detector entry open
    for both dots is an extrapolated configuration (see
    BlockingConfig.unrestricted); note that rule 4 has no entry-side
    counterpart, so that configuration dephases without a coherent
    entry transfer.
    """
    _require_equal_amplitudes(r, "the generalized coupled-dot scenario")
    idx = index_double_dot_set()
    labels = ("a", "b", "c")
    pos = {lab: idx.diagonal(lab) for lab in ("a", "a'", "b", "b'", "c", "c'")}

    def blocked(lab: str) -> bool:
        dot = _OCCUPIED_DOT[lab]
        if dot == 1:
            return cfg.blocked_when_dot1
        if dot == 2:
            return cfg.blocked_when_dot2
        return False

    # channel list: (source label, destination label, rate)
    channels = [("a", "b", r.Gamma_L), ("c", "a", r.Gamma_R),
                ("a'", "b'", r.Gamma_L), ("c'", "a'", r.Gamma_R)]
    for lab in labels:
        if not blocked(lab):
            channels.append((lab, lab + "'", r.gamma_L))
        channels.append((lab + "'", lab, r.gamma_R))
        if blocked(lab) and cfg.backflow_when_blocked:
            channels.append((lab + "'", lab, r.gamma_L))

    out_rates = defaultdict(list)
    cell_terms = defaultdict(list)
    for src, dst, rate in channels:
        out_rates[src].append(rate)
        cell_terms[(pos[dst], pos[src])].append(rate)
        cell_terms[(pos[src], pos[src])].append(-rate)

    g = np.zeros((10, 10))
    for (i, j), terms in cell_terms.items():
        g[i, j] = fsum(terms)

    def coherence_block(pair, detuning):
        u, v = idx.coherence(pair)
        bpos, cpos = pos[pair[0]], pos[pair[1]]
        decay = fsum(out_rates[pair[0]] + out_rates[pair[1]]) / 2.0
        g[u, u] = -decay
        g[u, v] = -detuning
        g[v, u] = detuning
        g[v, v] = -decay
        g[bpos, v] = -2.0 * r.Omega
        g[cpos, v] = 2.0 * r.Omega
        g[v, bpos] = r.Omega
        g[v, cpos] = -r.Omega

    coherence_block(("b", "c"), r.epsilon)
    coherence_block(("b'", "c'"), fsum((r.epsilon, -r.U1, r.U2)))

    # rule 4: coherent transfer from the primed pair into the unprimed one
    feed_terms = [r.gamma_R]
    if blocked("b") and blocked("c") and cfg.backflow_when_blocked:
        feed_terms.append(r.gamma_L)
    feed = fsum(feed_terms)
    u, v = idx.coherence(("b", "c"))
    up, vp = idx.coherence(("b'", "c'"))
    g[u, up] = feed
    g[v, vp] = feed

    return Generator(g, idx, GENERALIZED_DOUBLE_DOT_SET)


def build_scenario(scenario: str, r: RateSet,
                   blocking: BlockingConfig | None = None) -> Generator:
    """Dispatch a scenario label to its builder."""
    if scenario == SINGLE_DOT_SET:
        return build_single_dot_set(r)
    if scenario == DOUBLE_DOT_BARE:
        return build_double_dot_bare(r)
    if scenario == DOUBLE_DOT_SET:
        return build_double_dot_set(r)
    if scenario == REDUCED_DOUBLE_DOT:
        return build_reduced_double_dot(r)
    if scenario == GENERALIZED_DOUBLE_DOT_SET:
        if blocking is None:
            raise ValueError("the generalized scenario needs a BlockingConfig")
        return build_generalized_double_dot_set(r, blocking)
    raise ValueError(f"unknown scenario {scenario!r}")
