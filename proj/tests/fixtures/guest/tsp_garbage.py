# stub-policy: garbage at=1
# Fault injection: garbage.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    print('not json')
    return unvisited_nodes[0]
