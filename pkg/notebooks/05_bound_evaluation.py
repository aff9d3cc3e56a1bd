import numpy as np

from singular_gmres import make_problem
from singular_gmres.analysis import bound_inputs, theorem_bound
from singular_gmres.densela import PinvPolicy
from singular_gmres.krylov import HessSolveStrategy, SolveConfig
from singular_gmres.precond import Precond, ab_gmres, build_jacobi_spd
from singular_gmres.problems import RhsMode

# Evaluate the a priori bound on ||A^T r_k|| next to the observed values (inconsistent GP system)
p = make_problem("gp", rhs=RhsMode.inconsistent())
c = build_jacobi_spd(p.a)
bi = bound_inputs(p.a, c, p.b)
print(f"sigma_1 = {bi.sigma1:.3e}, sigma_r = {bi.sigma_r:.3e}, rate = {bi.rate:.6f}, kappa(A) = {bi.kappa_a:.3e}")

cfg = SolveConfig(strategy=HessSolveStrategy.pseudoinverse(PinvPolicy.relative(1e-8)),
                  max_iter=128, stop_tol=0.0)
h = ab_gmres(p.a, Precond.cat(c), p.b, config=cfg)
atb = np.linalg.norm(p.a.T @ p.b)
for rec in h.records[::10]:
    bound = theorem_bound(bi, rec.iter)[1]
    print(f"k={rec.iter:3d}  observed={rec.at_rel_res * atb:.3e}  bound={bound:.3e}")
# The rate is close to one for this spectrum, so the bound is valid but not sharp
