"""Frozen reference values (computed once at 50 digits with mpmath, R = Gamma = 1).

    h1 = log(2)/(8 pi), h2 = log(2)/(4 pi)
    r* solves r exp(-1/r^2) = 4
    parallel: p_phi^2 = 9/(32 pi) at theta_bar = 2 pi/3, period 2 pi sin^2/p_phi
    E_hat values by direct evaluation of the McGehee energy
"""
import math

H1 = 0.02757945001908145
H2 = 0.0551589000381629
R_STAR = 4.229925647947318
EIG = 0.0795774715459477           # Gamma / (4 pi)
E_HAT_LIMIT = 0.6366197723675813   # 2 Gamma R^2 / pi
E_HAT_GENERIC = 1.0602495147978014  # E_hat(h=0.1, r=0.5, alpha=0.3)
E_HAT_NEAR_COLLISION = 0.636616611252375  # E_hat(h=-1, r=1e-3, alpha=1)

PARALLEL_THETA = 2.0 * math.pi / 3.0
PARALLEL_P_PHI = 0.2992067103010745
PARALLEL_P_PHI_PRINTED = 0.21157109383040861
PARALLEL_PERIOD = 15.74960994572242

K = 1.0 / (8.0 * math.pi)
