# coding: utf-8

# # Repeated points: pseudoinverse versus nugget
#
# Ten observations at five distinct sites. The covariance matrix has
# rank five, so plain kriging cannot invert it.

# In[1]:

import numpy as np

from krigreg import PI, ConditioningError, Exact, KernelSpec, Nugget, fit
from krigreg.dataio import read_data_csv

X, y = read_data_csv(open("data/averaging.csv").read())
kernel = KernelSpec.squared_exponential([0.5])
print(X.ravel())
print(y)


# Exact inversion is refused outright:

# In[2]:

try:
    fit(X, y, kernel, Exact())
except ConditioningError as exc:
    print("refused:", exc)


# The pseudoinverse model predicts the average of the outputs at each
# repeated site, and its variance there is zero.

# In[3]:

pi = fit(X, y, kernel, PI())
sites = np.array([1.0, 1.5, 2.0, 2.5, 3.0])
print(pi.predict_mean(sites))
print(pi.predict_var(sites))


# A nugget smooths instead of averaging exactly. As it shrinks, the nugget
# model approaches the pseudoinverse one.

# In[4]:

grid = np.linspace(0.5, 3.5, 100)
for tau2 in (1e-1, 1e-3, 1e-5, 1e-7):
    nug = fit(X, y, kernel, Nugget(tau2))
    gap = np.max(np.abs(nug.predict_mean(grid) - pi.predict_mean(grid)))
    print(f"tau2={tau2:.0e}  max mean gap={gap:.2e}")
