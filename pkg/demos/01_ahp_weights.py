"""
Crisp AHP weights from integer priorities
=========================================

"""

import numpy as np

from gwvuln import PairwiseMatrix, ahp_weights, consistency, matrix_from_priorities
from gwvuln.tables import DRASTIC_LU_PARAMETERS, standard_priorities

# integer importance of D R A S T I C LU
v = standard_priorities()
pm = matrix_from_priorities(v, DRASTIC_LU_PARAMETERS)
np.set_printoptions(precision=3, suppress=True)
print(pm.a)

w = ahp_weights(pm)
for p, x in zip(w.labels, w.w):
    print(f"{p:>3} {x:.4f}")

# a ratio matrix is perfectly consistent: lambda_max == n, CR == 0
c = consistency(pm, w)
print(f"lambda_max={c.lambda_max:.6f} CI={c.ci:.2e} CR={c.cr:.2e}")

# perturb one judgement and watch the ratio move
a = pm.a.copy()
a[0, 4], a[4, 0] = 9.0, 1 / 9.0
print("perturbed CR:", round(consistency(PairwiseMatrix(a)).cr, 4))
