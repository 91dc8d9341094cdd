# coding: utf-8

# # Distribution-wise interpolation of repeated observations
#
# Each site is summarized by its count, mean and variance. The model
# interpolates the mean and the spread, and the number of replicates
# does not change the answer.

# In[1]:

import numpy as np

from krigreg import KernelSpec, Nugget, fit, fit_distwise, group_repeated_points
from krigreg.dataio import read_data_csv

X, y = read_data_csv(open("data/averaging.csv").read())
kernel = KernelSpec.squared_exponential([0.5])
sites = group_repeated_points(X, y)
for s in sites:
    print(s)


# In[2]:

model = fit_distwise(sites, kernel)
print("mean at 2:", model.predict_mean(2.0))
print("variance at 2:", model.predict_var(2.0))


# Compare with a nugget model: more replicates make it more confident,
# while the distribution-wise variance stays at the site spread.

# In[3]:

for n in (2, 10, 100):
    Xn = np.full(n, 2.0)
    yn = np.linspace(-1.0, 1.0, n)
    yn = (yn - yn.mean()) / yn.std()
    v_nug = fit(Xn, yn, kernel, Nugget(0.5)).predict_var(2.0)
    v_dist = fit_distwise(group_repeated_points(Xn, yn), kernel).predict_var(2.0)
    print(n, round(v_nug, 4), round(v_dist, 4))
