import pytest
from hypothesis import given
from hypothesis import strategies as st

from wsnsim.energy import EnergyLedger, EnergyState, RadioParams, aggregate_cost, debit, rx_cost, tx_cost

RADIO = RadioParams()


def test_tx_cost_zero_bits():
    assert tx_cost(0, 50, RADIO) == 0.0


def test_tx_cost_hand_computed():
    # 50e-9*2000 + 100e-12*2000*50**2 = 1e-4 + 5e-4
    assert tx_cost(2000, 50, RADIO) == pytest.approx(6.0e-4, rel=1e-12)


def test_tx_cost_zero_distance_is_electronics_only():
    assert tx_cost(2000, 0, RADIO) == RADIO.e_elec * 2000


def test_rx_cost():
    assert rx_cost(0, RADIO) == 0.0
    assert rx_cost(2000, RADIO) == pytest.approx(1.0e-4, rel=1e-12)


@given(st.integers(1, 10**6), st.floats(1e-3, 1e3))
def test_rx_strictly_cheaper_than_tx(bits, d):
    assert rx_cost(bits, RADIO) < tx_cost(bits, d, RADIO)


def test_aggregate_cost():
    assert aggregate_cost(0, RADIO) == 0.0
    assert aggregate_cost(5 * 2000, RADIO) == pytest.approx(5.0e-5, rel=1e-12)
    assert aggregate_cost(4000, RADIO) == pytest.approx(2 * aggregate_cost(2000, RADIO), rel=1e-15)


def test_negative_inputs_rejected():
    with pytest.raises(ValueError):
        tx_cost(-1, 1, RADIO)
    with pytest.raises(ValueError):
        tx_cost(1, -1, RADIO)
    with pytest.raises(ValueError):
        RadioParams(e_elec=-1)
    with pytest.raises(ValueError):
        RadioParams(data_bits=0)


def test_debit_partial():
    s = debit(EnergyState.full(2.0), 0.5)
    assert (s.residual, s.dissipated, s.alive) == (1.5, 0.5, True)


def test_debit_clamps_and_kills():
    s = debit(EnergyState(2.0, 0.3, 1.7), 0.5)
    assert s.residual == 0.0
    assert s.dissipated == pytest.approx(2.0)
    assert not s.alive


def test_debit_rejects_negative():
    with pytest.raises(ValueError):
        debit(EnergyState.full(1.0), -0.1)


@given(st.lists(st.floats(0, 0.5, allow_nan=False), max_size=60))
def test_debit_sequence_conserves_energy(amounts):
    s = EnergyState.full(2.0)
    prev = s.residual
    for a in amounts:
        if not s.alive:
            break
        s = s.debit(a)
        assert s.residual <= prev
        prev = s.residual
        assert s.residual + s.dissipated == pytest.approx(s.initial, rel=1e-9)


@given(st.lists(st.tuples(st.integers(0, 4), st.floats(0, 0.3, allow_nan=False)), max_size=100))
def test_ledger_matches_state_and_never_charges_the_dead(ops):
    ledger = EnergyLedger(5, 1.0)
    states = [EnergyState.full(1.0) for _ in range(5)]
    for i, amount in ops:
        if not ledger.alive(i):
            with pytest.raises(RuntimeError):
                ledger.charge(i, amount)
            continue
        before = ledger.residual[i]
        paid, done = ledger.charge(i, amount)
        states[i] = states[i].debit(amount)
        assert done == (amount <= before)
        assert paid == min(amount, before)
        assert ledger.residual[i] == pytest.approx(states[i].residual, abs=1e-15)
        init, res, dis = ledger.totals()
        assert init == pytest.approx(res + dis, rel=1e-9)
