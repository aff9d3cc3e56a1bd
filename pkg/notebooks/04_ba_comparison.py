from singular_gmres import bench

# Left preconditioning (BA-GMRES) against right preconditioning (AB-GMRES) on GP,
# once for the inconsistent right-hand side and once for the consistent one.
for suite in ("ba-comparison", "ba-comparison-consistent"):
    res = bench.run_suite(suite, jobs=4)
    print(f"--- {suite} ({res.suite.metric.value})")
    for name in res.histories:
        print(f"{name:28s} min={res.minimum(name):.3e}")
