"""Shared helpers: independent oracles and scenario builders."""

import numpy as np
import pytest

import specpredict as sp


def sequential_path(x0, uniforms, lam, mu):
    """Reference chain stepping, one transition per uniform (oracle)."""
    out = []
    x = int(x0)
    for u in uniforms:
        if x == 0:
            x = 1 if u < lam else 0
        else:
            x = 0 if u < mu else 1
        out.append(x)
    return np.array(out, dtype=np.uint8)


def make_scenario(
    lam=0.2,
    mu=0.3,
    users=None,
    n_steps=50,
    mode=None,
    initial=None,
    p_th_dbm=-90.0,
    model=None,
):
    """One-primary scenario with free-space losses; users as
    (id, distance_km) pairs, 1 km in-range by default."""
    if users is None:
        users = (("u1", 1.0),)
    geoms = tuple(
        (
            uid,
            sp.LinkGeometry(
                distance_km=d, h_tx_m=10.0, h_rx_m=10.0, freq_mhz=1000.0
            ),
        )
        for uid, d in users
    )
    return sp.Scenario(
        markov=sp.MarkovParams(lam=lam, mu=mu),
        radio=sp.RadioParams(p_tx_dbm=30.0, g_t_dbi=0.0, g_r_dbi=0.0, p_th_dbm=p_th_dbm),
        users=geoms,
        model=model if model is not None else sp.PropagationModel(sp.FreeSpaceLoss()),
        n_steps=n_steps,
        mode=mode if mode is not None else sp.MonteCarlo(seed=1234),
        initial=initial,
    )


@pytest.fixture
def basic_geometry():
    return sp.LinkGeometry(distance_km=1.0, h_tx_m=10.0, h_rx_m=10.0, freq_mhz=1000.0)
