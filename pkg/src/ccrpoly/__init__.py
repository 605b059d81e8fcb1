"""CCR modular polynomials U, V, W and the isogeny numerators N_A, N_B."""
