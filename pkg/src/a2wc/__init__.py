"""Extended affine Weyl group E6^(1) on A2^(1)*-surfaces, in exact rational arithmetic."""
