# stub-policy: crash at=1
# Fault injection: crash.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    return 1 // 0
