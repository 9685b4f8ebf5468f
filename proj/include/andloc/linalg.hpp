#pragma once

// Thin LAPACKE wrappers used everywhere dense linear algebra is needed:
// QR re-orthonormalization for transfer-matrix runs and dense eigensolvers
// for closed samples.

#include "common.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <cstdlib>
#include <limits>
#include <stdexcept>

namespace andloc::linalg {

// BLAS threading fights the process-level worker pool; keep it scalar unless
// the caller already configured it.
inline void pin_single_thread() {
    ::setenv("OPENBLAS_NUM_THREADS", "1", 0);
    ::setenv("OMP_NUM_THREADS", "1", 0);
}

// Orthonormalizes the columns of a in place (a becomes the thin Q factor with
// the R diagonal rotated real positive) and returns ln|r_kk|.
inline RVec qr_lndiag(Mat& a) {
    const lapack_int m = lapack_int(a.rows()), n = lapack_int(a.cols());
    if (m < n) throw std::invalid_argument("qr_lndiag: need rows >= cols");
    Vec tau(n);
    lapack_int info = LAPACKE_zgeqrf(LAPACK_COL_MAJOR, m, n, a.data(), m, tau.data());
    if (info != 0) throw std::runtime_error("zgeqrf failed, info " + std::to_string(info));
    RVec lnd(n);
    Vec phase(n);
    for (lapack_int k = 0; k < n; ++k) {
        cplx rkk = a(k, k);
        double mag = std::abs(rkk);
        lnd(k) = mag > 0 ? std::log(mag) : -std::numeric_limits<double>::infinity();
        phase(k) = mag > 0 ? rkk / mag : cplx(1, 0);
    }
    info = LAPACKE_zungqr(LAPACK_COL_MAJOR, m, n, n, a.data(), m, tau.data());
    if (info != 0) throw std::runtime_error("zungqr failed, info " + std::to_string(info));
    for (lapack_int k = 0; k < n; ++k) a.col(k) *= phase(k);
    return lnd;
}

struct Eig {
    Vec values;
    Mat vectors;  // right eigenvectors as columns; empty when not requested
};

inline Eig eig(Mat h, bool want_vectors = true) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eig: square matrix required");
    const lapack_int n = lapack_int(h.rows());
    Eig out;
    out.values = Vec(n);
    if (want_vectors) out.vectors = Mat(n, n);
    lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n,
                                    h.data(), n, out.values.data(), nullptr, 1,
                                    want_vectors ? out.vectors.data() : nullptr, n);
    if (info != 0) throw std::runtime_error("zgeev failed, info " + std::to_string(info));
    return out;
}

struct EigH {
    RVec values;
    Mat vectors;
};

inline EigH eig_hermitian(Mat h, bool want_vectors = true) {
    if (h.rows() != h.cols()) throw std::invalid_argument("eig_hermitian: square matrix required");
    const lapack_int n = lapack_int(h.rows());
    EigH out;
    out.values = RVec(n);
    lapack_int info = LAPACKE_zheev(LAPACK_COL_MAJOR, want_vectors ? 'V' : 'N', 'L', n,
                                    h.data(), n, out.values.data());
    if (info != 0) throw std::runtime_error("zheev failed, info " + std::to_string(info));
    if (want_vectors) out.vectors = std::move(h);
    return out;
}

// Worst relative eigenpair residual, max_k |H v_k - w_k v_k| / |H|_F.
inline double eig_residual(const Mat& h, const Eig& e) {
    if (e.vectors.size() == 0) throw std::invalid_argument("eig_residual: vectors missing");
    double scale = std::max(1e-300, h.norm());
    double worst = 0;
    for (Eigen::Index k = 0; k < e.values.size(); ++k) {
        double r = (h * e.vectors.col(k) - e.values(k) * e.vectors.col(k)).norm() /
                   (scale * std::max(1e-300, e.vectors.col(k).norm()));
        worst = std::max(worst, r);
    }
    return worst;
}

}  // namespace andloc::linalg
