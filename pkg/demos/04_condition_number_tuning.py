# coding: utf-8

# # Tuning regularization to a target condition number

# In[1]:

import numpy as np

from krigreg import (
    KernelSpec,
    condition_number,
    covariance_matrix,
    eigendecompose,
    pi_tolerance_for_condition,
    smallest_nugget_for_condition,
)

X = np.concatenate([np.linspace(0, 2, 15), [1.0 + 1e-6]])
sd = eigendecompose(covariance_matrix(KernelSpec.squared_exponential([0.5]), X))
lam = sd.eigenvalues
print("condition number:", condition_number(sd))


# The smallest nugget bringing the condition number down to kappa_max:

# In[2]:

for kappa_max in (1e4, 1e8, 1e12):
    tau2 = smallest_nugget_for_condition(lam[0], lam[-1], kappa_max)
    print(f"kappa_max={kappa_max:.0e}  tau2={tau2:.3e}  achieved={condition_number(sd.shifted(tau2)):.3e}")


# The pseudoinverse tolerance for the same target drops every eigenvalue
# below lambda_1 / kappa_max.

# In[3]:

for kappa_max in (1e4, 1e8):
    eta = pi_tolerance_for_condition(lam[0], kappa_max)
    print(f"kappa_max={kappa_max:.0e}  eta={eta:.3e}  rank={int(np.sum(lam > eta))}")
