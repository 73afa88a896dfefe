"""Randomly shifted lattice time-splitting for the Schrodinger equation with a
Gaussian random potential.

All heavy lifting happens in the compiled ``_qmcts`` extension; configuration
keys of the command-line tool are accepted as keyword arguments.
"""

from ._qmcts import (  # noqa: F401
    Phi,
    QmctsError,
    __version__,
    cbc,
    cosine_potential,
    estimate,
    fit_rate,
    gauss_hermite,
    grid_nodes,
    inv_Phi,
    lambda_star,
    lattice_points,
    mc_points,
    random_shifts,
    reference,
    rho,
    solve,
    standard_error,
    theta_for,
)
