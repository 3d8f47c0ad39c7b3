# stub-policy: invalid at=1
# Fault injection: invalid.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    return 0
