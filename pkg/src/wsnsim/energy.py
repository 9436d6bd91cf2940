"""First-order radio energy model and per-node battery bookkeeping.

Transmitting ``k`` bits over ``d`` meters costs ``e_elec*k + eps_amp*k*d**2``;
receiving costs ``e_elec*k``; aggregating ``k`` input bits costs ``e_da*k``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace


@dataclass(frozen=True)
class RadioParams:
    e_elec: float = 50e-9
    eps_amp: float = 100e-12
    e_da: float = 5e-9
    data_bits: int = 2000
    control_bits: int = 64

    def __post_init__(self):
        for name in ("e_elec", "eps_amp", "e_da"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.data_bits < 1 or self.control_bits < 1:
            raise ValueError("packet sizes must be >= 1 bit")


def tx_cost(bits: float, distance: float, radio: RadioParams) -> float:
    """Energy (J) to transmit ``bits`` over ``distance`` meters."""
    if bits < 0 or distance < 0:
        raise ValueError("bits and distance must be non-negative")
    return radio.e_elec * bits + radio.eps_amp * bits * distance * distance


def rx_cost(bits: float, radio: RadioParams) -> float:
    if bits < 0:
        raise ValueError("bits must be non-negative")
    return radio.e_elec * bits


def aggregate_cost(total_input_bits: float, radio: RadioParams) -> float:
    if total_input_bits < 0:
        raise ValueError("bits must be non-negative")
    return radio.e_da * total_input_bits


@dataclass(frozen=True)
class EnergyState:
    """Battery of a single node. ``initial == residual + dissipated`` always."""

    initial: float
    residual: float
    dissipated: float = 0.0

    @classmethod
    def full(cls, initial: float) -> EnergyState:
        return cls(initial=initial, residual=initial, dissipated=0.0)

    @property
    def alive(self) -> bool:
        return self.residual > 0

    def debit(self, amount: float) -> EnergyState:
        paid = _clamp(amount, self.residual)
        if paid >= self.residual:
            return replace(self, residual=0.0, dissipated=self.dissipated + paid)
        return replace(self, residual=self.residual - paid, dissipated=self.dissipated + paid)


def debit(state: EnergyState, amount: float) -> EnergyState:
    return state.debit(amount)


def _clamp(amount: float, residual: float) -> float:
    if amount < 0:
        raise ValueError(f"negative debit: {amount}")
    return amount if amount < residual else residual


class EnergyLedger:
    """Mutable battery bank for a whole network, indexed by node id.

    The simulation loop charges nodes through :meth:`charge`, which applies the
    same clamp rule as :meth:`EnergyState.debit`: a charge larger than the
    remaining charge drains the battery, kills the node and reports the action
    as not completed.
    """

    def __init__(self, n: int, initial: float):
        if initial <= 0:
            raise ValueError("initial energy must be positive")
        self.initial = [float(initial)] * n
        self.residual = [float(initial)] * n
        self.dissipated = [0.0] * n

    def __len__(self):
        return len(self.residual)

    def alive(self, i: int) -> bool:
        return self.residual[i] > 0

    def charge(self, i: int, amount: float) -> tuple[float, bool]:
        """Debit node ``i``; return (joules actually paid, action completed)."""
        residual = self.residual[i]
        if residual <= 0:
            raise RuntimeError(f"debit applied to dead node {i}")
        paid = _clamp(amount, residual)
        if paid >= residual:
            self.residual[i] = 0.0
        else:
            self.residual[i] = residual - paid
        self.dissipated[i] += paid
        return paid, amount <= residual

    def state(self, i: int) -> EnergyState:
        return EnergyState(self.initial[i], self.residual[i], self.dissipated[i])

    def totals(self) -> tuple[float, float, float]:
        return sum(self.initial), sum(self.residual), sum(self.dissipated)
