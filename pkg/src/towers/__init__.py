"""Postnikov towers, t-structures and semiorthogonal decompositions for quiver complexes over F_p."""
