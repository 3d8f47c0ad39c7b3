# One loop holding one conditional.
def select_next_node(current_node, destination_node, unvisited_nodes, distance_matrix):
    best = unvisited_nodes[0]
    for node in unvisited_nodes:
        if distance_matrix[current_node][node] < distance_matrix[current_node][best]:
            best = node
    return best
