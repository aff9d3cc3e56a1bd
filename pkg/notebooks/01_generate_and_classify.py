import numpy as np

from singular_gmres import classify, gen_gp_matrix, gen_index2_matrix
from singular_gmres.analysis import range_symmetry_defect
from singular_gmres.precond import build_jacobi_spd

# Two structured 128 x 128 singular test matrices with a tiny trailing spectrum
gp = gen_gp_matrix()
i2 = gen_index2_matrix()

for name, a in [("gp", gp), ("index2", i2)]:
    print(f"--- {name}")
    print(classify(a).report())

# Singular values drop off a cliff after the numerical rank
s = np.linalg.svd(gp, compute_uv=False)
print("gp sigma[60:68] =", s[60:68])

# Neither matrix is range symmetric, but A C A^T always is
for name, a in [("gp", gp), ("index2", i2)]:
    c = build_jacobi_spd(a)
    ab = a @ np.diag(c) @ a.T
    print(name, "null leak of A:", range_symmetry_defect(a).null_leak,
          "| null leak of A C A^T:", range_symmetry_defect(ab).null_leak)
