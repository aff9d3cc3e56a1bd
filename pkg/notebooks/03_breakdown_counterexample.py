import numpy as np

from singular_gmres import Precond, SolveConfig, ab_gmres, gmres
from singular_gmres.problems import jordan_block

# The 2 x 2 nilpotent Jordan block with b = e1 is consistent (x = e2 solves it),
# yet the Krylov space K_k(A, b) = span{e1} never contains a solution.
a = jordan_block(2, 0.0)
b = np.array([1.0, 0.0])

plain = gmres(a, b, config=SolveConfig(max_iter=2))
print("GMRES:", plain.termination, "rel_res =", plain.rel_res, "notes =", plain.notes)

# With B = A^T the operator A A^T is symmetric and the method solves it in one step
ab = ab_gmres(a, Precond.at(), b, config=SolveConfig(max_iter=2))
print("AB-GMRES:", ab.termination, "x =", ab.final_x, "rel_res =", ab.rel_res)
