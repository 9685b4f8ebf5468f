#pragma once

// Symmetry operations on concrete matrices: checking defining relations,
// Hermitization at a reference energy, and classification of a Hamiltonian
// given a candidate set of unitaries. No unitary is ever searched for; the
// caller supplies candidates and only their products are formed.

#include "common.hpp"
#include "rng.hpp"
#include "symclass.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <optional>

namespace andloc::symmetry {

enum class OpKind { TRS, PHS, TRSdag, PHSdag, CS, SLS };

inline const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::TRS: return "TRS";
        case OpKind::PHS: return "PHS";
        case OpKind::TRSdag: return "TRSdag";
        case OpKind::PHSdag: return "PHSdag";
        case OpKind::CS: return "CS";
        case OpKind::SLS: return "SLS";
    }
    return "?";
}

inline OpKind op_kind_from_string(const std::string& s) {
    std::string n = normalize_class_name(s);
    if (n == "TRS") return OpKind::TRS;
    if (n == "PHS") return OpKind::PHS;
    if (n == "TRSdag") return OpKind::TRSdag;
    if (n == "PHSdag") return OpKind::PHSdag;
    if (n == "CS") return OpKind::CS;
    if (n == "SLS") return OpKind::SLS;
    throw std::invalid_argument("unknown symmetry kind: " + s);
}

struct SymmetryOp {
    OpKind kind;
    Mat u;
    int sign;  // UU* for the antiunitary kinds; ignored for CS/SLS

    static SymmetryOp trs(Mat u, int sign) { return {OpKind::TRS, std::move(u), sign}; }
    static SymmetryOp phs(Mat u, int sign) { return {OpKind::PHS, std::move(u), sign}; }
    static SymmetryOp trs_dag(Mat u, int sign) { return {OpKind::TRSdag, std::move(u), sign}; }
    static SymmetryOp phs_dag(Mat u, int sign) { return {OpKind::PHSdag, std::move(u), sign}; }
    static SymmetryOp cs(Mat u) { return {OpKind::CS, std::move(u), 0}; }
    static SymmetryOp sls(Mat u) { return {OpKind::SLS, std::move(u), 0}; }
};

// U f(H) U^+ with the transform and target sign of each relation.
inline Mat apply_op(const SymmetryOp& op, const Mat& h) {
    switch (op.kind) {
        case OpKind::TRS:
        case OpKind::PHSdag: return op.u * h.conjugate() * op.u.adjoint();
        case OpKind::PHS:
        case OpKind::TRSdag: return op.u * h.transpose() * op.u.adjoint();
        case OpKind::CS: return op.u * h.adjoint() * op.u.adjoint();
        case OpKind::SLS: return op.u * h * op.u.adjoint();
    }
    return h;
}

inline double relation_sign(OpKind k) {
    return (k == OpKind::TRS || k == OpKind::TRSdag) ? 1.0 : -1.0;
}

struct VerifyReport {
    bool holds = false;
    double relation_residual = 0.0;  // || U f(H) U^+ -+ H ||_F / ||H||_F
    double unitary_residual = 0.0;   // || U U^+ - 1 ||_F / sqrt(N)
    double structure_residual = 0.0; // || UU* - sign || or || U^2 - 1 ||, relative
};

inline VerifyReport verify(const Mat& h, const SymmetryOp& op, double tol = 1e-10) {
    VerifyReport r;
    const auto n = h.rows();
    if (op.u.rows() != n || op.u.cols() != n)
        throw std::invalid_argument("symmetry unitary has wrong dimension");
    double hn = h.norm();
    if (hn < 1e-300) hn = 1.0;
    r.relation_residual = (apply_op(op, h) - relation_sign(op.kind) * h).norm() / hn;
    double rootn = std::sqrt(static_cast<double>(n));
    r.unitary_residual = (op.u * op.u.adjoint() - Mat::Identity(n, n)).norm() / rootn;
    if (op.kind == OpKind::CS || op.kind == OpKind::SLS) {
        r.structure_residual = (op.u * op.u - Mat::Identity(n, n)).norm() / rootn;
    } else {
        if (op.sign != 1 && op.sign != -1)
            throw std::invalid_argument("antiunitary symmetry needs sign +1 or -1");
        r.structure_residual =
            (op.u * op.u.conjugate() - double(op.sign) * Mat::Identity(n, n)).norm() / rootn;
    }
    r.holds = r.relation_residual < tol && r.unitary_residual < tol && r.structure_residual < tol;
    return r;
}

// ---------------------------------------------------------------------------
// Hermitization

// Doubled Hermitian matrix at reference energy E:
//   [[0, H-E], [(H-E)^+, 0]], anticommuting with tau_z.
// Its eigenvalues are the +- singular values of H-E, and a singular value at
// zero corresponds to eigenmodes (0, phi_r) and (phi_l, 0) built from the
// right/left null vectors of H-E.
struct HermitizedPair {
    Mat doubled;
    Mat chiral;  // tau_z x 1
    cplx energy;
};

inline HermitizedPair hermitize(const Mat& h, cplx energy) {
    const auto n = h.rows();
    if (h.cols() != n) throw std::invalid_argument("hermitize needs a square matrix");
    Mat shifted = h - energy * Mat::Identity(n, n);
    HermitizedPair out;
    out.doubled = Mat::Zero(2 * n, 2 * n);
    out.doubled.block(0, n, n, n) = shifted;
    out.doubled.block(n, 0, n, n) = shifted.adjoint();
    out.chiral = Mat::Zero(2 * n, 2 * n);
    out.chiral.block(0, 0, n, n) = Mat::Identity(n, n);
    out.chiral.block(n, n, n, n) = -Mat::Identity(n, n);
    out.energy = energy;
    return out;
}

inline double smallest_singular_value(const Mat& h, cplx energy) {
    Mat shifted = h - energy * Mat::Identity(h.rows(), h.cols());
    Eigen::JacobiSVD<Mat> svd(shifted);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

struct ZeroModes {
    bool present = false;
    double sigma_min = 0.0;
    Vec right;  // (H-E) right  -> embedded as (0, right)
    Vec left;   //  left null   -> embedded as (left, 0)
};

// Relative threshold: sigma_min < thresh * ||H||.
inline ZeroModes zero_modes(const Mat& h, cplx energy, double thresh = 1e-8) {
    Mat shifted = h - energy * Mat::Identity(h.rows(), h.cols());
    Eigen::JacobiSVD<Mat> svd(shifted, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ZeroModes zm;
    const auto last = svd.singularValues().size() - 1;
    zm.sigma_min = svd.singularValues()(last);
    double scale = std::max(h.norm(), 1e-300);
    zm.present = zm.sigma_min < thresh * scale;
    if (zm.present) {
        zm.right = svd.matrixV().col(last);
        zm.left = svd.matrixU().col(last);
    }
    return zm;
}

// ---------------------------------------------------------------------------
// Classification

struct OpReport {
    SymmetryOp op;
    VerifyReport check;
    bool derived = false;  // formed as a product of supplied candidates
};

struct ClassifyResult {
    const ClassRecord* record = nullptr;
    std::vector<OpReport> ops;
    bool ambiguous = false;
    std::string message;
};

namespace detail {

// Rescale a would-be involution so that U^2 = +1 exactly up to rounding.
// Products of symmetry unitaries square to a scalar phase on the classes we
// tabulate; a non-scalar square means the inputs were inconsistent.
inline std::optional<Mat> normalize_involution(Mat u, double tol) {
    const auto n = u.rows();
    Mat sq = u * u;
    cplx phase = sq.trace() / static_cast<double>(n);
    if (std::abs(phase) < 0.5) return std::nullopt;
    if ((sq - phase * Mat::Identity(n, n)).norm() / std::sqrt(double(n)) > tol) return std::nullopt;
    // u' = u / sqrt(phase) squares to 1.
    return Mat(u / std::sqrt(phase));
}

}  // namespace detail

// Identify the finest tabulated class consistent with the candidate ops that
// actually hold on H. Missing chiral/sublattice relations that follow from
// products of holding antiunitaries are filled in automatically; nothing else
// is searched for. Ambiguities (two holding ops of the same kind with
// different signs) are reported, not resolved.
inline ClassifyResult classify(const Mat& h, const std::vector<SymmetryOp>& candidates,
                               double tol = 1e-10) {
    ClassifyResult res;
    // index into res.ops of the first holding op of each kind, -1 if none
    std::array<int, 6> held;
    held.fill(-1);
    for (const auto& cand : candidates) {
        VerifyReport rep = verify(h, cand, tol);
        res.ops.push_back({cand, rep, false});
        if (!rep.holds) continue;
        auto idx = static_cast<size_t>(cand.kind);
        if (held[idx] >= 0) {
            if (res.ops[held[idx]].op.sign != cand.sign) {
                res.ambiguous = true;
                res.message = std::string("conflicting signs for ") + to_string(cand.kind);
                return res;
            }
            continue;
        }
        held[idx] = static_cast<int>(res.ops.size()) - 1;
    }

    auto sign_of = [&](OpKind k) {
        int i = held[static_cast<size_t>(k)];
        return i < 0 ? 0 : res.ops[i].op.sign;
    };
    auto u_of = [&](OpKind k) -> Mat { return res.ops[held[static_cast<size_t>(k)]].op.u; };
    auto has = [&](OpKind k) { return held[static_cast<size_t>(k)] >= 0; };

    // Complete the unitary symmetries from antiunitary products.
    auto add_derived = [&](OpKind kind, const Mat& u_raw) {
        if (has(kind)) return;
        auto u = detail::normalize_involution(u_raw, 100 * tol);
        if (!u) return;
        SymmetryOp op{kind, *u, 0};
        VerifyReport rep = verify(h, op, tol);
        if (!rep.holds) return;
        res.ops.push_back({op, rep, true});
        held[static_cast<size_t>(kind)] = static_cast<int>(res.ops.size()) - 1;
    };

    // Complete the antiunitary symmetries from products with CS/SLS. The sign
    // of a derived antiunitary is measured from U U*.
    auto derive_anti = [&](OpKind kind, const Mat& u_raw) {
        if (has(kind)) return;
        const auto n = h.rows();
        Mat uu = u_raw * u_raw.conjugate();
        cplx s = uu.trace() / double(n);
        int sign = s.real() > 0.5 ? +1 : (s.real() < -0.5 ? -1 : 0);
        if (sign == 0) return;
        if ((uu - double(sign) * Mat::Identity(n, n)).norm() > 100 * tol * std::sqrt(double(n)))
            return;
        SymmetryOp op{kind, u_raw, sign};
        VerifyReport rep = verify(h, op, tol);
        if (!rep.holds) return;
        res.ops.push_back({op, rep, true});
        held[static_cast<size_t>(kind)] = static_cast<int>(res.ops.size()) - 1;
    };

    for (int round = 0; round < 2; ++round) {
        if (has(OpKind::TRS) && has(OpKind::PHS))
            add_derived(OpKind::CS, Mat(u_of(OpKind::PHS) * u_of(OpKind::TRS).conjugate()));
        if (has(OpKind::TRSdag) && has(OpKind::PHSdag))
            add_derived(OpKind::CS, Mat(u_of(OpKind::PHSdag) * u_of(OpKind::TRSdag).conjugate()));
        if (has(OpKind::TRS) && has(OpKind::PHSdag))
            add_derived(OpKind::SLS, Mat(u_of(OpKind::PHSdag) * u_of(OpKind::TRS).adjoint()));
        if (has(OpKind::TRSdag) && has(OpKind::PHS))
            add_derived(OpKind::SLS, Mat(u_of(OpKind::PHS) * u_of(OpKind::TRSdag).adjoint()));
        if (has(OpKind::SLS)) {
            if (has(OpKind::TRS))
                derive_anti(OpKind::PHSdag, Mat(u_of(OpKind::SLS) * u_of(OpKind::TRS)));
            if (has(OpKind::PHS))
                derive_anti(OpKind::TRSdag, Mat(u_of(OpKind::SLS) * u_of(OpKind::PHS)));
            if (has(OpKind::TRSdag))
                derive_anti(OpKind::PHS, Mat(u_of(OpKind::SLS) * u_of(OpKind::TRSdag)));
            if (has(OpKind::PHSdag))
                derive_anti(OpKind::TRS, Mat(u_of(OpKind::SLS) * u_of(OpKind::PHSdag)));
        }
        if (has(OpKind::CS)) {
            if (has(OpKind::TRS))
                derive_anti(OpKind::PHS, Mat(u_of(OpKind::CS) * u_of(OpKind::TRS).transpose()));
            if (has(OpKind::PHS))
                derive_anti(OpKind::TRS, Mat(u_of(OpKind::CS) * u_of(OpKind::PHS).transpose()));
            if (has(OpKind::TRSdag))
                derive_anti(OpKind::PHSdag,
                            Mat(u_of(OpKind::CS) * u_of(OpKind::TRSdag).transpose()));
            if (has(OpKind::PHSdag))
                derive_anti(OpKind::TRSdag,
                            Mat(u_of(OpKind::CS) * u_of(OpKind::PHSdag).transpose()));
        }
    }

    int comm = 0;
    if (has(OpKind::CS) && has(OpKind::SLS)) {
        Mat uc = u_of(OpKind::CS), us = u_of(OpKind::SLS);
        const auto n = h.rows();
        double plus = (uc * us - us * uc).norm() / std::sqrt(double(n));
        double minus = (uc * us + us * uc).norm() / std::sqrt(double(n));
        if (plus < 100 * tol && minus > 0.5)
            comm = +1;
        else if (minus < 100 * tol && plus > 0.5)
            comm = -1;
        else {
            res.ambiguous = true;
            res.message = "chiral and sublattice unitaries neither commute nor anticommute";
            return res;
        }
    }

    res.record = find_by_signature(sign_of(OpKind::TRS), sign_of(OpKind::PHS),
                                   sign_of(OpKind::TRSdag), sign_of(OpKind::PHSdag),
                                   has(OpKind::CS), has(OpKind::SLS), comm);
    if (!res.record) res.message = "symmetry signature matches no tabulated class";
    return res;
}

// ---------------------------------------------------------------------------
// Random matrices in a prescribed class (halved/quartered block conventions;
// used by tests and the classify demo).

namespace detail {

inline Mat complex_gaussian(Eigen::Index n, rng::Stream& st) {
    Mat g(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < n; ++i) g(i, j) = cplx(st.normal(), st.normal());
    return g;
}

// Block operators acting on the two halves of the index space.
inline Mat big_sigma(Eigen::Index n, const Eigen::Matrix2cd& s) {
    Mat half = Mat::Identity(n / 2, n / 2);
    Mat out = Mat::Zero(n, n);
    out.block(0, 0, n / 2, n / 2) = s(0, 0) * half;
    out.block(0, n / 2, n / 2, n / 2) = s(0, 1) * half;
    out.block(n / 2, 0, n / 2, n / 2) = s(1, 0) * half;
    out.block(n / 2, n / 2, n / 2, n / 2) = s(1, 1) * half;
    return out;
}

}  // namespace detail

// Draw a dense random matrix in one of the supported classes, together with
// the symmetry ops that define it. Dimension constraints follow the class
// (even, or a multiple of 4 for the four-block structures).
inline std::pair<Mat, std::vector<SymmetryOp>> random_matrix_in_class(const std::string& name,
                                                                      Eigen::Index n,
                                                                      rng::Stream st) {
    const ClassRecord& rec = class_record(name);
    std::string cname = rec.name;

    auto need_even = [&] {
        if (n % 2) throw std::invalid_argument(cname + " sample needs even dimension");
    };
    auto need_mult4 = [&] {
        if (n % 4) throw std::invalid_argument(cname + " sample needs dimension divisible by 4");
    };

    Mat g = detail::complex_gaussian(n, st);
    std::vector<SymmetryOp> ops;

    if (cname == "A") {
        return {g, ops};
    }
    if (cname == "AI") {
        Mat h = g.real().cast<cplx>();
        ops.push_back(SymmetryOp::trs(Mat::Identity(n, n), +1));
        return {h, ops};
    }
    if (cname == "AII") {
        need_even();
        Mat sy = detail::big_sigma(n, pauli_y());
        Mat h = 0.5 * (g + sy * g.conjugate() * sy.adjoint());
        ops.push_back(SymmetryOp::trs(sy, -1));
        return {h, ops};
    }
    if (cname == "AIIdag") {
        need_even();
        Mat sy = detail::big_sigma(n, pauli_y());
        Mat h = 0.5 * (g + sy * g.transpose() * sy.adjoint());
        ops.push_back(SymmetryOp::trs_dag(sy, -1));
        return {h, ops};
    }
    if (cname == "AIII") {
        need_even();
        Mat sz = detail::big_sigma(n, pauli_z());
        Mat h = 0.5 * (g - sz * g.adjoint() * sz.adjoint());
        ops.push_back(SymmetryOp::cs(sz));
        return {h, ops};
    }
    if (cname == "CIIdag") {
        // TRS-dagger with sigma_y in each tau sector, PHS-dagger with tau_z sigma_y.
        need_mult4();
        Mat upd = kron(pauli_z().cast<cplx>(), detail::big_sigma(n / 2, pauli_y()));
        Mat utd = kron(Mat::Identity(2, 2), detail::big_sigma(n / 2, pauli_y()));
        Mat h = 0.5 * (g + utd * g.transpose() * utd.adjoint());
        h = 0.5 * (h - upd * h.conjugate() * upd.adjoint());
        ops.push_back(SymmetryOp::trs_dag(utd, -1));
        ops.push_back(SymmetryOp::phs_dag(upd, -1));
        return {h, ops};
    }
    if (cname == "DIII") {
        need_even();
        Mat sy = detail::big_sigma(n, pauli_y());
        Mat sx = detail::big_sigma(n, pauli_x());
        Mat h = 0.5 * (g + sy * g.conjugate() * sy.adjoint());
        h = 0.5 * (h - sx * h.transpose() * sx.adjoint());
        ops.push_back(SymmetryOp::trs(sy, -1));
        ops.push_back(SymmetryOp::phs(sx, +1));
        return {h, ops};
    }
    throw std::invalid_argument("random_matrix_in_class: unsupported class " + cname);
}

}  // namespace andloc::symmetry
