"""Fading channel realizations with distance-based path loss.

Two cells, one shared far user, one aerial RIS at the cell edge. Link
classes and their small-scale models:

    bs_near, bs_far, interfering   Rayleigh (CN(0, 1) small-scale factor)
    bs_ris, ris_near, ris_far      Rician, deterministic LoS phase from the
                                   link's geometric length at 2.4 GHz

Every coefficient is sqrt(path-loss) times a unit-second-moment small-scale
factor, so E[|h|^2] equals the linear path loss of the link.
"""

from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299792458.0
CARRIER_HZ = 2.4e9
WAVELENGTH_M = SPEED_OF_LIGHT / CARRIER_HZ

# user indexing shared across the package
NEAR_1, NEAR_2, FAR = 0, 1, 2
USER_TAGS = ("near_1", "near_2", "far")

LINK_CLASSES = ("bs_near", "bs_far", "bs_ris", "ris_near", "ris_far", "interfering")

# Collinear default layout satisfying the 150 m / 300 m BS-user distances
# exactly: BSs mirrored on the x axis, far user on the ground between them,
# near users halfway along each BS-to-far-user segment, RIS airborne above
# the far user (equidistant cell edge).
_BS_X = float(np.sqrt(300.0**2 - 8.5**2))  # 8.5 m = BS height minus UE height


def _default_bs_positions():
    return np.array([[-_BS_X, 0.0, 10.0], [_BS_X, 0.0, 10.0]])


def _default_near_positions():
    return np.array([[-_BS_X / 2.0, 0.0, 5.75], [_BS_X / 2.0, 0.0, 5.75]])


@dataclass
class Geometry:
    bs_positions: np.ndarray = field(default_factory=_default_bs_positions)
    ris_position: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 50.0]))
    near_user_positions: np.ndarray = field(default_factory=_default_near_positions)
    far_user_position: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.5]))

    def __post_init__(self):
        self.bs_positions = np.asarray(self.bs_positions, dtype=float).reshape(2, 3)
        self.ris_position = np.asarray(self.ris_position, dtype=float).reshape(3)
        self.near_user_positions = np.asarray(self.near_user_positions, dtype=float).reshape(2, 3)
        self.far_user_position = np.asarray(self.far_user_position, dtype=float).reshape(3)
        for name, d in self.distances().items():
            if not d > 0:
                raise ValueError(f"non-positive link distance for {name}: {d}")

    def d_bs_near(self, cell: int) -> float:
        return float(np.linalg.norm(self.bs_positions[cell] - self.near_user_positions[cell]))

    def d_bs_far(self, cell: int) -> float:
        return float(np.linalg.norm(self.bs_positions[cell] - self.far_user_position))

    def d_bs_ris(self, cell: int) -> float:
        return float(np.linalg.norm(self.bs_positions[cell] - self.ris_position))

    def d_ris_near(self, cell: int) -> float:
        return float(np.linalg.norm(self.ris_position - self.near_user_positions[cell]))

    def d_ris_far(self) -> float:
        return float(np.linalg.norm(self.ris_position - self.far_user_position))

    def d_interfering(self, cell: int) -> float:
        """BS `cell` to the other cell's near user."""
        return float(np.linalg.norm(self.bs_positions[cell] - self.near_user_positions[1 - cell]))

    def distances(self) -> dict:
        return {
            "bs1_near1": self.d_bs_near(0),
            "bs2_near2": self.d_bs_near(1),
            "bs1_far": self.d_bs_far(0),
            "bs2_far": self.d_bs_far(1),
            "bs1_ris": self.d_bs_ris(0),
            "bs2_ris": self.d_bs_ris(1),
            "ris_near1": self.d_ris_near(0),
            "ris_near2": self.d_ris_near(1),
            "ris_far": self.d_ris_far(),
            "bs1_near2": self.d_interfering(0),
            "bs2_near1": self.d_interfering(1),
        }


@dataclass
class PathLossParams:
    """Reference loss at d0 = 1 m plus per-link-class exponents.

    The default reference level absorbs antenna and system gains; with the
    2.4 GHz noise bandwidth it places the default power sweep in the regime
    where rate and outage curves exhibit their transitions.
    """

    reference_loss_db: float = 15.0
    exponents: dict = field(
        default_factory=lambda: {
            "bs_near": 3.2,
            "bs_far": 4.5,
            "bs_ris": 2.7,
            "ris_near": 3.0,
            "ris_far": 2.7,
            "interfering": 4.2,
        }
    )

    def __post_init__(self):
        unknown = set(self.exponents) - set(LINK_CLASSES)
        if unknown:
            raise ValueError(f"unknown link classes: {sorted(unknown)}")
        missing = set(LINK_CLASSES) - set(self.exponents)
        if missing:
            raise ValueError(f"missing link classes: {sorted(missing)}")
        for link, alpha in self.exponents.items():
            if not alpha > 0:
                raise ValueError(f"exponent for {link} must be positive, got {alpha}")


@dataclass
class RicianParams:
    """K factors in dB per Rician link class."""

    k_factor_db: dict = field(
        default_factory=lambda: {"bs_ris": 4.0, "ris_near": 3.0, "ris_far": 4.0}
    )

    def k_linear(self, link: str) -> float:
        return float(10.0 ** (self.k_factor_db[link] / 10.0))


def path_loss_linear(d, link: str, params: PathLossParams):
    """Linear power attenuation PL(d0) / d^alpha for the link class."""
    d = np.asarray(d, dtype=float)
    if np.any(d <= 0):
        raise ValueError(f"distance must be positive, got {d}")
    alpha = params.exponents[link]
    return 10.0 ** (params.reference_loss_db / 10.0) / d**alpha


def los_phase(d: float) -> float:
    """Deterministic LoS phase of a link of length d, in [0, 2pi)."""
    return float((-2.0 * np.pi * d / WAVELENGTH_M) % (2.0 * np.pi))


def draw_rayleigh(rng: np.random.Generator, size=None):
    """CN(0, 1) small-scale factor(s); E[|w|^2] = 1.

    Draw order is real parts then imaginary parts, which the per-trial
    determinism contract relies on.
    """
    re = rng.standard_normal(size)
    im = rng.standard_normal(size)
    return (re + 1j * im) / np.sqrt(2.0)


def draw_rician(rng: np.random.Generator, k_linear: float, los_phase_rad: float, size=None):
    """Rician factor(s) with unit second moment and the given LoS phase."""
    if k_linear < 0:
        raise ValueError(f"Rician K must be non-negative, got {k_linear}")
    los = np.exp(1j * los_phase_rad)
    scatter = draw_rayleigh(rng, size)
    a = np.sqrt(k_linear / (k_linear + 1.0))
    b = np.sqrt(1.0 / (k_linear + 1.0))
    return a * los + b * scatter


@dataclass
class ChannelRealization:
    """One Monte Carlo draw of every link in the cluster.

    Arrays may carry leading batch axes (trials first); the trailing axes
    are fixed as documented. `interference[c]` is the channel from BS c to
    the *other* cell's near user.
    """

    direct_near: np.ndarray  # (..., 2) BS c -> its near user
    direct_far: np.ndarray  # (..., 2) BS c -> shared far user
    interference: np.ndarray  # (..., 2) BS c -> foreign near user
    bs_to_ris: np.ndarray  # (..., 2, M)
    ris_to_user: np.ndarray  # (..., 3, M) rows follow NEAR_1, NEAR_2, FAR

    @property
    def m_elements(self) -> int:
        return self.bs_to_ris.shape[-1]


def realize_channels(
    geometry: Geometry,
    path_loss: PathLossParams,
    rician: RicianParams,
    m: int,
    rng: np.random.Generator,
) -> ChannelRealization:
    """Draw one realization of all links, scaled by sqrt(path loss).

    The draw order is fixed (direct near, direct far, interference,
    BS->RIS per cell, RIS->user per user) so that a given rng stream
    always yields the same realization.
    """
    if m < 0:
        raise ValueError(f"element count must be non-negative, got {m}")

    amp_near = np.array(
        [np.sqrt(path_loss_linear(geometry.d_bs_near(c), "bs_near", path_loss)) for c in (0, 1)]
    )
    direct_near = amp_near * draw_rayleigh(rng, 2)

    amp_far = np.array(
        [np.sqrt(path_loss_linear(geometry.d_bs_far(c), "bs_far", path_loss)) for c in (0, 1)]
    )
    direct_far = amp_far * draw_rayleigh(rng, 2)

    amp_int = np.array(
        [
            np.sqrt(path_loss_linear(geometry.d_interfering(c), "interfering", path_loss))
            for c in (0, 1)
        ]
    )
    interference = amp_int * draw_rayleigh(rng, 2)

    bs_to_ris = np.empty((2, m), dtype=complex)
    k_bs = rician.k_linear("bs_ris")
    for c in (0, 1):
        d = geometry.d_bs_ris(c)
        amp = np.sqrt(path_loss_linear(d, "bs_ris", path_loss))
        bs_to_ris[c] = amp * draw_rician(rng, k_bs, los_phase(d), m)

    ris_to_user = np.empty((3, m), dtype=complex)
    for u, (link, d) in enumerate(
        [
            ("ris_near", geometry.d_ris_near(0)),
            ("ris_near", geometry.d_ris_near(1)),
            ("ris_far", geometry.d_ris_far()),
        ]
    ):
        amp = np.sqrt(path_loss_linear(d, link, path_loss))
        ris_to_user[u] = amp * draw_rician(rng, rician.k_linear(link), los_phase(d), m)

    return ChannelRealization(direct_near, direct_far, interference, bs_to_ris, ris_to_user)
