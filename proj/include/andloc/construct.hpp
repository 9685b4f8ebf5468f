#pragma once

// Build a non-Hermitian matrix of a prescribed class out of one or two
// Hermitian inputs, such that every eigenvector of the input at its reference
// energy reappears as a right eigenmode of the output at the class-conserving
// energy, transformed only by a local unitary (and possibly conjugated).
//
// Each target class accepts inputs from exactly one Hermitian class and in a
// fixed canonical form, which is verified before anything is built:
//   A    : any Hermitian matrix
//   AI   : diag form  V h* V^+ = h with V = diag(1_{n1}, -1_{n2}),  or
//          swap form  V = [[0,1],[1,0]] on the two index halves (even dim)
//   AIII : [[0, h], [h^+, 0]] with equal chiral halves
//   BDI  : the AIII form with h real
// Chiral-family inputs contribute through their zero modes, so the reference
// energy of such an input must be 0 and the returned mode maps pick out the
// chirality components of a supplied null vector.

#include "symmetry.hpp"

#include <string>
#include <vector>

namespace andloc::symmetry {

struct ConstructInput {
    Mat h;
    double e_ref = 0.0;      // eigenvalue of h whose eigenvector should carry over
    int split = -1;          // n1 of a diag-form input; -1 picks a balanced split
    bool swap_form = false;  // AI input given in swap form instead of diag form
};

// Recipe for rebuilding an output eigenmode from an input eigenvector:
//   phi = map * (conjugate ? psi.conjugate() : psi)
// For chiral inputs the map projects on one chirality sector first, so phi can
// vanish when the supplied null vector has no weight there.
struct ModeMap {
    int input = 0;
    bool conjugate = false;
    Mat map;
};

struct Constructed {
    Mat h;
    cplx energy{0.0, 0.0};
    const ClassRecord* record = nullptr;
    std::vector<SymmetryOp> ops;
    std::vector<ModeMap> modes;
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument("construct_from_hermitian: " + msg);
}

inline double mat_scale(const Mat& m) { return std::max(m.norm(), 1e-300); }

inline void check_hermitian(const Mat& m, double tol, const std::string& what) {
    require(m.rows() == m.cols(), what + " must be square");
    require((m - m.adjoint()).norm() <= tol * mat_scale(m), what + " is not Hermitian");
}

// diag(1_{n1}, -1_{n2})
inline Mat two_block_sign(Eigen::Index n1, Eigen::Index n2) {
    Mat v = Mat::Identity(n1 + n2, n1 + n2);
    v.block(n1, n1, n2, n2) *= -1.0;
    return v;
}

// sigma_y acting inside consecutive index pairs (a strictly local spin flip).
inline Mat spin_flip_y(Eigen::Index n) {
    Mat s = Mat::Zero(n, n);
    for (Eigen::Index i = 0; i + 1 < n; i += 2) {
        s(i, i + 1) = cplx(0, -1);
        s(i + 1, i) = cplx(0, 1);
    }
    return s;
}

inline Eigen::Index split_of(const ConstructInput& in) {
    Eigen::Index n = in.h.rows();
    Eigen::Index n1 = in.split < 0 ? (n + 1) / 2 : in.split;
    require(n1 >= 0 && n1 <= n, "split outside the matrix dimension");
    return n1;
}

// Top-right block of [[0, h], [h^+, 0]] after checking that shape.
inline Mat chiral_offdiag(const Mat& m, double tol, const std::string& what) {
    check_hermitian(m, tol, what);
    require(m.rows() % 2 == 0, what + " needs even dimension (two chiral halves)");
    Eigen::Index n = m.rows() / 2;
    double s = mat_scale(m);
    require(m.block(0, 0, n, n).norm() <= tol * s && m.block(n, n, n, n).norm() <= tol * s,
            what + " must vanish on the chiral-diagonal blocks");
    return m.block(0, n, n, n);
}

inline void check_real(const Mat& m, double tol, const std::string& what) {
    require(m.imag().norm() <= tol * mat_scale(m), what + " must be real");
}

// V_T of an AI-form input, verifying the input actually satisfies it.
inline Mat ai_form_unitary(const ConstructInput& in, double tol, const std::string& what) {
    check_hermitian(in.h, tol, what);
    Mat v;
    if (in.swap_form) {
        require(in.h.rows() % 2 == 0, what + " in swap form needs even dimension");
        v = big_sigma(in.h.rows(), pauli_x());
    } else {
        Eigen::Index n1 = split_of(in);
        v = two_block_sign(n1, in.h.rows() - n1);
    }
    require((v * in.h.conjugate() * v.adjoint() - in.h).norm() <= tol * mat_scale(in.h),
            what + " does not satisfy the real-class relation for its declared form");
    return v;
}

inline Mat kron2(const Eigen::Matrix2cd& t, const Mat& b) { return kron(Mat(t.cast<cplx>()), b); }

}  // namespace detail

inline Constructed construct_from_hermitian(const std::string& recipe,
                                            const std::vector<ConstructInput>& inputs,
                                            cplx e = cplx(0.0, 0.0), double tol = 1e-10) {
    using detail::require;
    const ClassRecord& rec = class_record(recipe);
    const std::string name = rec.name;

    static const char* known[] = {"AIII",    "AIII+S-", "BDI+S-+", "CI+S-+", "CI",
                                  "BDIdag",  "CI+S+-",  "AIIIdag", "AIII+S+", "D+S+",
                                  "C+S+",    "AI+S-",   "AI+S+",   "BDI+S++", "CI+S++"};
    bool supported = false;
    for (const char* k : known) supported |= (name == k);
    require(supported, "no construction targets class " + name);

    bool two = (name == "AIII+S-" || name == "CI+S+-" || name == "AIIIdag" || name == "AI+S+");
    require(inputs.size() == (two ? 2u : 1u),
            name + (two ? " takes two input matrices" : " takes one input matrix"));
    for (const auto& in : inputs) require(in.h.rows() == in.h.cols(), "inputs must be square");
    if (two)
        require(inputs[0].h.rows() == inputs[1].h.rows(), "both inputs need the same dimension");

    require(energy_kind_within(kind_of_energy(e), rec.energy),
            std::string("energy breaks the symmetries of ") + name + " (needs " +
                to_string(rec.energy) + ")");

    const Eigen::Index n = inputs[0].h.rows();
    const Mat id_n = Mat::Identity(n, n);
    auto shifted = [&](int i) -> Mat { return inputs[i].h - inputs[i].e_ref * id_n; };
    auto top = [&](const Mat& m) {  // 2n x n embedding into the upper half
        Mat p = Mat::Zero(2 * n, n);
        p.block(0, 0, n, n) = m;
        return p;
    };
    auto bottom = [&](const Mat& m) {
        Mat p = Mat::Zero(2 * n, n);
        p.block(n, 0, n, n) = m;
        return p;
    };

    Constructed out;
    out.record = &rec;
    out.energy = e;

    if (name == "AIII") {
        detail::check_hermitian(inputs[0].h, tol, "input");
        Eigen::Index n1 = detail::split_of(inputs[0]);
        Mat u = detail::two_block_sign(n1, n - n1);
        out.h = cplx(0, -1) * (shifted(0) * u) + e * id_n;
        out.ops = {SymmetryOp::cs(u)};
        out.modes = {{0, false, u}};
    } else if (name == "AIII+S-") {
        detail::check_hermitian(inputs[0].h, tol, "first input");
        detail::check_hermitian(inputs[1].h, tol, "second input");
        out.h = Mat::Zero(2 * n, 2 * n);
        out.h.block(0, n, n, n) = shifted(0);
        out.h.block(n, 0, n, n) = shifted(1);
        out.ops = {SymmetryOp::cs(detail::kron2(pauli_y(), id_n)),
                   SymmetryOp::sls(detail::kron2(pauli_z(), id_n))};
        out.modes = {{0, false, bottom(id_n)}, {1, false, top(id_n)}};
    } else if (name == "BDI+S-+") {
        detail::check_hermitian(inputs[0].h, tol, "input");
        Mat a = shifted(0);
        out.h = Mat::Zero(2 * n, 2 * n);
        out.h.block(0, n, n, n) = cplx(0, 1) * a;
        out.h.block(n, 0, n, n) = cplx(0, -1) * a.conjugate();
        out.ops = {SymmetryOp::trs(detail::kron2(pauli_x(), id_n), +1),
                   SymmetryOp::phs(Mat::Identity(2 * n, 2 * n), +1),
                   SymmetryOp::sls(detail::kron2(pauli_z(), id_n))};
        out.modes = {{0, true, top(id_n)}, {0, false, bottom(id_n)}};
    } else if (name == "CI+S-+") {
        detail::check_hermitian(inputs[0].h, tol, "input");
        require(n % 2 == 0, "CI+S-+ needs an even input dimension (local spin pairs)");
        Mat s = detail::spin_flip_y(n);
        Mat a = shifted(0);
        out.h = Mat::Zero(2 * n, 2 * n);
        out.h.block(0, n, n, n) = a;
        out.h.block(n, 0, n, n) = -s * a.conjugate() * s;
        out.ops = {SymmetryOp::trs(detail::kron2(pauli_y(), s), +1),
                   SymmetryOp::phs(detail::kron2(Eigen::Matrix2cd::Identity(), s), -1),
                   SymmetryOp::sls(detail::kron2(pauli_z(), id_n))};
        out.modes = {{0, true, top(s)}, {0, false, bottom(id_n)}};
    } else if (name == "CI") {
        ConstructInput in = inputs[0];
        in.swap_form = true;
        Mat vt = detail::ai_form_unitary(in, tol, "input");
        Mat sz = detail::big_sigma(n, pauli_z());
        out.h = cplx(0, -1) * (shifted(0) * sz);
        out.ops = {SymmetryOp::trs(vt, +1), SymmetryOp::phs(detail::big_sigma(n, pauli_y()), -1)};
        out.modes = {{0, false, sz}};
    } else if (name == "BDIdag") {
        ConstructInput in = inputs[0];
        require(!in.swap_form, "BDIdag takes the diag-form input");
        Mat vt = detail::ai_form_unitary(in, tol, "input");
        out.h = cplx(0, -1) * (shifted(0) * vt) + e * id_n;
        out.ops = {SymmetryOp::trs_dag(id_n, +1), SymmetryOp::phs_dag(vt, +1)};
        out.modes = {{0, false, vt}};
    } else if (name == "CI+S+-") {
        require(inputs[0].swap_form == inputs[1].swap_form &&
                    (inputs[0].swap_form || detail::split_of(inputs[0]) == detail::split_of(inputs[1])),
                "both CI+S+- inputs must be given in the same form");
        Mat vt = detail::ai_form_unitary(inputs[0], tol, "first input");
        detail::ai_form_unitary(inputs[1], tol, "second input");
        out.h = Mat::Zero(2 * n, 2 * n);
        out.h.block(0, n, n, n) = shifted(0);
        out.h.block(n, 0, n, n) = shifted(1);
        out.ops = {SymmetryOp::sls(detail::kron2(pauli_z(), id_n)),
                   SymmetryOp::trs(detail::kron2(Eigen::Matrix2cd::Identity(), vt), +1),
                   SymmetryOp::phs(detail::kron2(pauli_y(), vt), -1)};
        out.modes = {{0, false, bottom(id_n)}, {1, false, top(id_n)}};
    } else {
        // Chiral-family sources: the construction consumes the off-diagonal
        // block, and the output keeps the input's dimension.
        Mat h1 = detail::chiral_offdiag(inputs[0].h, tol, "input");
        require(std::abs(inputs[0].e_ref) <= tol,
                "chiral-family inputs contribute zero modes; reference energy must be 0");
        const Eigen::Index m = h1.rows();
        const Mat id_m = Mat::Identity(m, m);
        Mat upper_from_upper = Mat::Zero(2 * m, 2 * m);  // (xi+, xi-) -> (xi+, 0)
        upper_from_upper.block(0, 0, m, m) = id_m;
        Mat lower_from_lower = Mat::Zero(2 * m, 2 * m);  // -> (0, xi-)
        lower_from_lower.block(m, m, m, m) = id_m;
        Mat upper_from_lower = Mat::Zero(2 * m, 2 * m);  // -> (xi-, 0)
        upper_from_lower.block(0, m, m, m) = id_m;
        Mat tz = detail::kron2(pauli_z(), id_m);

        out.h = Mat::Zero(2 * m, 2 * m);
        out.h.block(0, m, m, m) = h1;

        if (name == "AIIIdag") {
            Mat h2 = detail::chiral_offdiag(inputs[1].h, tol, "second input");
            require(std::abs(inputs[1].e_ref) <= tol,
                    "chiral-family inputs contribute zero modes; reference energy must be 0");
            out.h.block(m, 0, m, m) = h2;
            out.ops = {SymmetryOp::sls(tz)};
            out.modes = {{0, false, lower_from_lower}, {1, false, upper_from_lower}};
        } else if (name == "AIII+S+") {
            out.h.block(m, 0, m, m) = -h1.adjoint();
            out.ops = {SymmetryOp::cs(Mat::Identity(2 * m, 2 * m)), SymmetryOp::sls(tz)};
            out.modes = {{0, false, upper_from_upper}, {0, false, lower_from_lower}};
        } else if (name == "D+S+") {
            out.h.block(m, 0, m, m) = h1.transpose();
            out.ops = {SymmetryOp::phs(tz, +1),
                       SymmetryOp::trs_dag(Mat::Identity(2 * m, 2 * m), +1), SymmetryOp::sls(tz)};
            out.modes = {{0, true, upper_from_upper}, {0, false, lower_from_lower}};
        } else if (name == "C+S+") {
            require(m % 2 == 0, "C+S+ needs an even chiral block (local spin pairs)");
            Mat s = detail::spin_flip_y(m);
            out.h.block(m, 0, m, m) = s * h1.transpose() * s;
            Mat su = Mat::Zero(2 * m, 2 * m);
            su.block(0, 0, m, m) = s;
            out.ops = {SymmetryOp::phs(detail::kron2(pauli_z(), s), -1),
                       SymmetryOp::trs_dag(detail::kron2(Eigen::Matrix2cd::Identity(), s), -1),
                       SymmetryOp::sls(tz)};
            out.modes = {{0, true, su}, {0, false, lower_from_lower}};
        } else if (name == "AI+S-") {
            out.h.block(m, 0, m, m) = h1.conjugate();
            out.ops = {SymmetryOp::trs(detail::kron2(pauli_x(), id_m), +1),
                       SymmetryOp::phs_dag(detail::kron2(pauli_y(), id_m), -1),
                       SymmetryOp::sls(tz)};
            out.modes = {{0, true, upper_from_lower}, {0, false, lower_from_lower}};
        } else if (name == "AI+S+") {
            detail::check_real(inputs[0].h, tol, "first input");
            Mat h2 = detail::chiral_offdiag(inputs[1].h, tol, "second input");
            detail::check_real(inputs[1].h, tol, "second input");
            require(std::abs(inputs[1].e_ref) <= tol,
                    "chiral-family inputs contribute zero modes; reference energy must be 0");
            out.h.block(m, 0, m, m) = h2;
            out.ops = {SymmetryOp::trs(Mat::Identity(2 * m, 2 * m), +1), SymmetryOp::sls(tz)};
            out.modes = {{0, false, lower_from_lower}, {1, false, upper_from_lower}};
        } else if (name == "BDI+S++") {
            detail::check_real(inputs[0].h, tol, "input");
            out.h.block(m, 0, m, m) = -h1.transpose();
            out.ops = {SymmetryOp::trs(Mat::Identity(2 * m, 2 * m), +1),
                       SymmetryOp::phs(Mat::Identity(2 * m, 2 * m), +1), SymmetryOp::sls(tz)};
            out.modes = {{0, false, upper_from_upper}, {0, false, lower_from_lower}};
        } else {  // CI+S++
            detail::check_real(inputs[0].h, tol, "input");
            require(m % 2 == 0, "CI+S++ needs an even chiral block (local spin pairs)");
            Mat s = detail::spin_flip_y(m);
            out.h.block(m, 0, m, m) = -s * h1.transpose() * s;
            Mat su = Mat::Zero(2 * m, 2 * m);
            su.block(0, 0, m, m) = s;
            out.ops = {SymmetryOp::trs(Mat::Identity(2 * m, 2 * m), +1),
                       SymmetryOp::phs(detail::kron2(Eigen::Matrix2cd::Identity(), s), -1),
                       SymmetryOp::sls(tz)};
            out.modes = {{0, false, su}, {0, false, lower_from_lower}};
        }
    }

    // The construction is exact arithmetic on verified inputs, so a failed
    // relation here is an internal inconsistency, not bad user data.
    double check_tol = std::max(1e-12, 10 * tol);
    for (const auto& op : out.ops) {
        VerifyReport rep = verify(out.h, op, check_tol);
        if (!rep.holds)
            throw std::logic_error(std::string("construct_from_hermitian: ") + name +
                                   " output violates its " + to_string(op.kind) + " relation");
    }
    return out;
}

}  // namespace andloc::symmetry
