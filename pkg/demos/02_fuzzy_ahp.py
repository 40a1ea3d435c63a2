"""
Fuzzy AHP with centroid defuzzification
=======================================

"""

import numpy as np

from gwvuln import FuzzyPairwiseMatrix, Tfn, defuzzify_centroid, fuzzy_ahp_weights, tfn_membership
from gwvuln.tables import DRASTIC_LU_PARAMETERS, STANDARD_FUZZY_MATRIX

t = Tfn(0.0, 1.0, 2.0)
xs = np.linspace(-0.5, 2.5, 7)
print([round(tfn_membership(t, x), 2) for x in xs])

# the published comparison triples are not ordered l <= m <= u,
# so they are only ever averaged, never evaluated as memberships
print(defuzzify_centroid(Tfn(5.00, 0.20, 1.00)))

fm = FuzzyPairwiseMatrix(STANDARD_FUZZY_MATRIX, DRASTIC_LU_PARAMETERS)
w = fuzzy_ahp_weights(fm)
for p, x in zip(w.labels, w.w):
    print(f"{p:>3} {x:.4f}")
