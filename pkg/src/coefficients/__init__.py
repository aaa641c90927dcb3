# Scalar systems that vector matrices and cohomology rings are taken over.
