import os

# Keep BLAS pools single-threaded so runtime numbers are comparable and the
# suite behaves the same on any box. Must happen before numpy loads.
for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(var, "1")
