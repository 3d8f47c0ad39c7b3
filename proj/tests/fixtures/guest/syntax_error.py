def select_next_node(a, b, c, d)
    return c[0]
