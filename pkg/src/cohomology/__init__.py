# Graded cohomology rings of the manifolds and searches inside them.
