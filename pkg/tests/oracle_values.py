"""Reference values frozen from independent computations.

Every constant below was produced before the implementation existed, by
``mpmath`` at 40 digits (closed forms and root finding) or, for the
interacting ground-state energy, by a direct minimization over a Hermite
basis (see ``hermite_basis_energy`` in ``test_oracles.py``, which
re-derives each value).
"""
import math

# int_0^1 sqrt(1/2 + 2 s^2) ds
F_ONE_DELTA_ONE = 1.045770523557194984

# Thomas-Fermi, d = 1, V = x^2/2: mu = (3 / (4 sqrt 2))^(2/3)
TF_MU_D1 = 0.6551853485522241518

# free boundary, case 2, d = 1, V = x^2/2, delta_inf = 1:
# 2 [x0^3/3 - x0^2 coth x0 + x0] = 1,  mu = 1 + x0^2/2 - x0 coth x0
C2_X0_D1 = 1.984735113399848979
C2_MU_D1 = 0.9084516981101176824

# case 2', d = 1, V = x^2/2, delta_inf = 1:
# 2 [-x0^3/3 - x0^2 cot x0 + x0] = 1,  mu = -1 + x0^2/2 + x0 cot x0
C2P_X0_D1 = 1.739275127756852331
C2P_MU_D1 = 0.2167035792396690384

# case 3: x0 = (45/2)^(1/5), mu = x0^2 / 6 (d = 1); d = 3: R = (1050 / (8 pi))^(1/7), mu = 3 R^2 / 10
C3_X0_D1 = 1.863959636595675694
C3_MU_D1 = 0.5790575878096472327
C3_R_D3 = 1.704371273095550008
C3_MU_D3 = 0.8714644309660037716

# case 1': (1 + cos x) / (2 pi), mu = -1/(2 pi), E = -1/(4 pi); d = 3 support radius tan R = R
C1P_MU_D1 = -0.1591549430918953358
C1P_E_D1 = -0.07957747154594766788
TAN_ROOT = 4.493409457909064175

# box B2, delta_inf = 1: c = 1 / (1 - 2 tanh(1/2)); B3: mu = 12, E = 6
B2_MU = 13.19858711321537953

# Gaussian pi^(-1/4) exp(-x^2/2): int phi^4 / 2 and int |(phi^2)'|^2 / 2 are both 1/(2 sqrt(2 pi))
GAUSS_HALF_QUARTIC = 0.1994711402007163390

# || 6x(1-x) ||_{L2(0,1)} = sqrt(36/30)
B3_L2_NORM = 1.095445115010332227

# ground-state energy, d = 1, V = x^2/2, beta = 10, delta = 1 (22 even Hermite functions, BFGS)
E_BETA10_DELTA1 = 1.9828323176605243

C_B = math.pi * 1.86225
