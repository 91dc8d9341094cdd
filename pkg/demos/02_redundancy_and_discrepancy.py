# coding: utf-8

# # Which points are redundant, and do the outputs agree with the model?

# In[1]:

from krigreg import KernelSpec, diagnose
from krigreg.dataio import read_data_csv

X, y = read_data_csv(open("data/discrepancy.csv").read())
report = diagnose(X, KernelSpec.squared_exponential([0.5]), y=y)
print(report.to_json())


# Points 3 and 4 sit at the same location with outputs 3 and 9. The
# residual is the part of y the kernel cannot represent: the two outputs
# are pulled towards their mean. The squared ratio says which share of
# the output energy that is.

# In[2]:

print("residual:", report.residual)
print("squared ratio:", report.discr_sq_ratio)
print("rms ratio:", report.discr_rms_ratio)


# Redundancy also appears without any repeated point. An additive kernel
# on a 2x2 grid cannot tell the corners apart from their row and column
# sums.

# In[3]:

X2, y2 = read_data_csv(open("data/additive_discr.csv").read())
rep2 = diagnose(X2, KernelSpec.additive([0.25, 0.25]), y=y2)
for g in rep2.groups:
    print("group", g.indices, "degree", g.degree)
print("residual:", rep2.residual.round(6))
