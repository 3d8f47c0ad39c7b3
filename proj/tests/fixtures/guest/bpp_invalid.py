# stub-policy: invalid at=0
# Fault injection: invalid.
def priority(item, bins):
    return [float('nan')]
