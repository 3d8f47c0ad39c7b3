# stub-policy: bpp.weighted fit=0 index=1
# First fit: prefer the lowest-indexed feasible bin.
def priority(item, bins):
    return [-float(i) for i in range(len(bins))]
