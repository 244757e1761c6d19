"""Linear-array geometry, channel switching, steering vectors, and the TDM-MIMO virtual array.

Positions are in meters along a single line; the electronic azimuth
``theta = sin(phi)`` is the natural parameter of the per-element phase
progression ``exp(j * k0 * d * theta)`` with wavenumber ``k0 = 2*pi/wavelength``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MODES = ("simo", "mimo")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class ArrayGeometry:
    """Physical Tx/Rx element positions plus wavelength and inter-pulse period.

    Both position lists must be strictly increasing and start at 0 (the first
    element anchors the line).
    """

    rx_positions: tuple[float, ...]
    tx_positions: tuple[float, ...]
    wavelength: float = 1.0
    inter_pulse: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "rx_positions", tuple(float(p) for p in self.rx_positions))
        object.__setattr__(self, "tx_positions", tuple(float(p) for p in self.tx_positions))
        for name, pos in (("rx_positions", self.rx_positions), ("tx_positions", self.tx_positions)):
            if len(pos) == 0:
                raise ValueError(f"{name} must be non-empty")
            if pos[0] != 0.0:
                raise ValueError(f"{name} must start at 0, got {pos[0]}")
            if any(b <= a for a, b in zip(pos, pos[1:])):
                raise ValueError(f"{name} must be strictly increasing")
        if self.wavelength <= 0:
            raise ValueError("wavelength must be positive")
        if self.inter_pulse < 0:
            raise ValueError("inter_pulse must be non-negative")

    @property
    def n_rx(self) -> int:
        return len(self.rx_positions)

    @property
    def n_tx(self) -> int:
        return len(self.tx_positions)

    @property
    def wavenumber(self) -> float:
        return 2.0 * np.pi / self.wavelength


@dataclass(frozen=True)
class ChannelSelection:
    """Active Tx and Rx channels as sorted 1-based index subsets.

    Equivalent to 0/1 switching matrices with one nonzero per row; the subset
    form is what every downstream computation consumes.
    """

    tx_idx: tuple[int, ...]
    rx_idx: tuple[int, ...]

    def __post_init__(self):
        for name, idx in (("tx_idx", self.tx_idx), ("rx_idx", self.rx_idx)):
            idx = tuple(int(i) for i in idx)
            object.__setattr__(self, name, idx)
            if len(idx) == 0:
                raise ValueError(f"{name} must contain at least one channel")
            if any(i < 1 for i in idx):
                raise ValueError(f"{name} indices are 1-based and must be >= 1")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise ValueError(f"{name} must be strictly increasing (sorted, distinct)")

    @property
    def n_tx(self) -> int:
        return len(self.tx_idx)

    @property
    def n_rx(self) -> int:
        return len(self.rx_idx)


def uniform_geometry(n_rx: int, n_tx: int, spacing_factor: float = 0.9,
                     wavelength: float = 1.0, inter_pulse: float = 0.0) -> ArrayGeometry:
    """Uniform Rx and Tx lines with adjacent spacing ``spacing_factor * wavelength / 2``."""
    if n_rx < 1 or n_tx < 1:
        raise ValueError("n_rx and n_tx must be >= 1")
    if spacing_factor <= 0:
        raise ValueError("spacing_factor must be positive")
    pitch = spacing_factor * wavelength / 2.0
    return ArrayGeometry(
        rx_positions=tuple(i * pitch for i in range(n_rx)),
        tx_positions=tuple(i * pitch for i in range(n_tx)),
        wavelength=wavelength,
        inter_pulse=inter_pulse,
    )


def _pick(positions: tuple[float, ...], idx: tuple[int, ...], label: str) -> np.ndarray:
    if any(i > len(positions) for i in idx):
        raise ValueError(f"{label} index out of range (array has {len(positions)} elements)")
    return np.array([positions[i - 1] for i in idx], dtype=float)


def selected_rx_positions(geom: ArrayGeometry, sel: ChannelSelection) -> np.ndarray:
    """Positions of the selected receivers, in rx_idx order."""
    return _pick(geom.rx_positions, sel.rx_idx, "rx")


def selected_tx_positions(geom: ArrayGeometry, sel: ChannelSelection) -> np.ndarray:
    """Positions of the selected transmitters, in tx_idx order."""
    return _pick(geom.tx_positions, sel.tx_idx, "tx")


def virtual_positions(geom: ArrayGeometry, sel: ChannelSelection) -> np.ndarray:
    """TDM-MIMO virtual array: every selected Tx position plus every selected Rx position.

    Tx-major order (for each selected Tx, all selected Rx offsets), matching the
    Kronecker structure of the switched MIMO steering vector. Coincident virtual
    elements are retained.
    """
    rx = selected_rx_positions(geom, sel)
    tx = selected_tx_positions(geom, sel)
    return (tx[:, None] + rx[None, :]).ravel()


def tdm_phases(sel: ChannelSelection, inter_pulse: float) -> np.ndarray:
    """Per-virtual-element Doppler phase slopes ``2*pi*T*p`` for pulse index p = 1..I_tx.

    The p-th selected transmitter fires the p-th pulse; its slope repeats for
    every selected receiver (Tx-major order).
    """
    if inter_pulse < 0:
        raise ValueError("inter_pulse must be non-negative")
    pulse = 2.0 * np.pi * inter_pulse * np.arange(1, sel.n_tx + 1)
    return np.repeat(pulse, sel.n_rx)


def effective_positions(geom: ArrayGeometry, sel: ChannelSelection, mode: str) -> np.ndarray:
    """Element positions that set the phase response: Rx subset (simo) or virtual array (mimo)."""
    _check_mode(mode)
    if mode == "simo":
        return selected_rx_positions(geom, sel)
    return virtual_positions(geom, sel)


def steering_vector(geom: ArrayGeometry, sel: ChannelSelection, theta: float,
                    f_d: float = 0.0, mode: str = "simo") -> np.ndarray:
    """Unit-modulus phase response of the active channels for a source at electronic azimuth theta.

    simo: ``exp(j*k0*d_i*theta)`` over the selected Rx positions.
    mimo: ``exp(j*(k0*d_i_virt*theta + tdm_i*f_d))`` over the virtual array, Tx-major.
    """
    _check_mode(mode)
    if abs(theta) > 1.0:
        raise ValueError(f"theta must lie in [-1, 1], got {theta}")
    phase = geom.wavenumber * effective_positions(geom, sel, mode) * theta
    if mode == "mimo":
        phase = phase + tdm_phases(sel, geom.inter_pulse) * f_d
    return np.exp(1j * phase)
