# coding: utf-8

# # Estimating the nugget from the data
#
# Noisy replicates of a smooth function. Maximum likelihood and
# leave-one-out cross-validation each pick a nugget.

# In[1]:

import numpy as np

from krigreg import KernelSpec, estimate_nugget_cv, estimate_nugget_ml

rng = np.random.default_rng(3)
sites = np.linspace(0.0, 3.0, 8)
X = np.repeat(sites, 3)
y = np.sin(2 * X) + 0.3 * rng.normal(size=X.size)
kernel = KernelSpec.squared_exponential([0.5])

print("ML nugget:", estimate_nugget_ml(X, y, kernel))
print("CV nugget:", estimate_nugget_cv(X, y, kernel))


# Spreading the replicates further apart should never make the ML
# nugget smaller.

# In[2]:

for factor in (1.0, 2.0, 4.0):
    y_wide = y.copy()
    for s in sites:
        idx = X == s
        y_wide[idx] = y[idx].mean() + factor * (y[idx] - y[idx].mean())
    print(factor, estimate_nugget_ml(X, y_wide, kernel))


# Length-scales and the nugget ratio can be searched jointly.

# In[3]:

from krigreg import estimate_lengthscales

hp = estimate_lengthscales(X, y, kernel, bounds=(0.05, 3.0), nugget_bounds=(1e-8, 1.0))
print(hp)
