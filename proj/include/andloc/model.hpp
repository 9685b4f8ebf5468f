#pragma once

// Disordered lattice models on square / cubic lattices in a quasi-1D slice
// geometry. Two families:
//
//   O(1):  real on-site disorder in [-W/2, W/2]; every directed bond carries
//          an independent sign +-1, so H = H* but H != H^T (class AI).
//   SU(2): spin-1/2 hoppings R(i,j) in SU(2) drawn from the invariant angle
//          measure; complex on-site potentials. The relation between the two
//          spin potentials and between R(i,j) and R(j,i) selects the class:
//            AII     eps_up = eps_dn*              R(j,i) = R^+(i,j)
//            AIIdag  eps_up = eps_dn               R(j,i) = R^+(i,j)
//            CIIdag  eps_up = eps_dn, W_r = 0      R(j,i) = R^+(i,j)   (bipartite)
//            DIII    eps_up = -eps_dn, W_r = 0     R(j,i) = -s_z R^+(i,j) s_z
//
// Every random number is drawn from a counter stream keyed by (seed, tag,
// site or ordered site pair), so instances are pure values: any slice can be
// generated at any time, in any order, bit-identically. With L = 2 and
// periodic wrap the two directed bonds of a doubled pair reuse the same keys
// and the entries accumulate.
//
// Component ordering inside a slice: component = n_orb * site + spin, with
// site = x (2D) or x + L*y (3D).

#include "common.hpp"
#include "rng.hpp"
#include "symclass.hpp"
#include "symmetry.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace andloc::model {

using symmetry::ClassRecord;
using symmetry::EnergyKind;

enum class Role { Transfer, ClosedPeriodic };

struct LatticeSpec {
    int d = 3;
    Eigen::Index l = 4;       // transverse edge
    Eigen::Index lz = 1;      // slices along the transmission direction
    bool transverse_periodic = true;
    Role role = Role::Transfer;

    Eigen::Index sites_per_slice() const { return d == 3 ? l * l : l; }

    void validate() const {
        if (d != 2 && d != 3) throw std::invalid_argument("lattice dimension must be 2 or 3");
        if (l < 2) throw std::invalid_argument("transverse size must be at least 2");
        if (lz < 1) throw std::invalid_argument("length must be at least 1 slice");
        if (role == Role::ClosedPeriodic && lz != l)
            throw std::invalid_argument("closed geometry is an L^d box; set lz = l");
    }
};

struct DisorderSpec {
    double w = 0.0;    // O(1)
    double w_r = 0.0;  // SU(2) real part
    double w_i = 0.0;  // SU(2) imaginary part
};

struct ClassTag {
    std::string name;  // normalized ASCII class name
    EnergyKind energy;
    const ClassRecord* record = nullptr;

    static ClassTag of(const std::string& raw) {
        const ClassRecord& rec = symmetry::class_record(raw);
        return {rec.name, rec.energy, &rec};
    }
};

enum class ModelKind { O1, SU2 };
enum class HopForm { DiagPM1, SU2Blocks };

// In-slice operator in component-level sparse form. Off-diagonal entries are
// listed per directed bond and may repeat (doubled wrap bonds); consumers add.
struct SliceOps {
    Vec diag;
    std::vector<int> row, col;
    std::vector<cplx> val;
};

// Hoppings between slice n and n+1, block-diagonal over transverse sites.
//   g: H_{(n),(n+1)}   (multiplies psi_{n+1} in the eigenproblem)
//   f: H_{(n+1),(n)}
struct LinkOps {
    HopForm form;
    std::vector<double> sgn_g, sgn_f;            // DiagPM1
    std::vector<Eigen::Matrix2cd> blk_g, blk_f;  // SU2Blocks
};

namespace detail {

inline Eigen::Matrix2cd su2_from_angles(double alpha, double beta, double gamma) {
    Eigen::Matrix2cd r;
    cplx ea = std::exp(cplx(0, alpha));
    cplx eg = std::exp(cplx(0, gamma));
    double cb = std::cos(beta), sb = std::sin(beta);
    r << ea * cb, eg * sb, -std::conj(eg) * sb, std::conj(ea) * cb;
    return r;
}

}  // namespace detail

class ModelInstance {
  public:
    LatticeSpec lattice;
    DisorderSpec disorder;
    ClassTag tag;
    std::uint64_t seed = 0;
    ModelKind kind = ModelKind::O1;

    Eigen::Index n_orb() const { return kind == ModelKind::O1 ? 1 : 2; }
    Eigen::Index sites() const { return lattice.sites_per_slice(); }
    Eigen::Index slice_dim() const { return n_orb() * sites(); }

    std::uint64_t gid(Eigen::Index n, Eigen::Index t) const {
        return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(sites()) +
               static_cast<std::uint64_t>(t);
    }

    // ---- elementary draws -------------------------------------------------

    double onsite_o1(std::uint64_t g) const {
        auto st = rng::Stream::keyed(seed, rng::Tag::OnSite, g);
        return st.uniform(-disorder.w / 2, disorder.w / 2);
    }

    // (eps_up, eps_dn) of one site.
    std::pair<cplx, cplx> onsite_su2(std::uint64_t g) const {
        auto st = rng::Stream::keyed(seed, rng::Tag::OnSite, g);
        double wr = st.uniform(-disorder.w_r / 2, disorder.w_r / 2);
        double wi = st.uniform(-disorder.w_i / 2, disorder.w_i / 2);
        if (tag.name == "AII") return {cplx(wr, wi), cplx(wr, -wi)};
        if (tag.name == "DIII") return {cplx(0, wi), cplx(0, -wi)};
        return {cplx(wr, wi), cplx(wr, wi)};  // AIIdag, CIIdag
    }

    double bond_o1(std::uint64_t gi, std::uint64_t gj) const {
        return rng::Stream::keyed(seed, rng::Tag::BondSign, gi, gj).pm1();
    }

    Eigen::Matrix2cd bond_su2(std::uint64_t gi, std::uint64_t gj) const {
        std::uint64_t lo = std::min(gi, gj), hi = std::max(gi, gj);
        auto st = rng::Stream::keyed(seed, rng::Tag::BondAngles, lo, hi);
        double alpha = st.angle();
        double gamma = st.angle();
        double beta = st.su2_beta();
        Eigen::Matrix2cd r = detail::su2_from_angles(alpha, beta, gamma);
        if (gi == lo) return r;
        if (tag.name == "DIII") {
            Eigen::Matrix2cd sz = pauli_z();
            return Eigen::Matrix2cd(-sz * r.adjoint() * sz);
        }
        return r.adjoint();
    }

    // ---- slice-level operators --------------------------------------------

    SliceOps slice_ops(Eigen::Index n) const {
        const Eigen::Index s = sites();
        const Eigen::Index no = n_orb();
        SliceOps ops;
        ops.diag = Vec(no * s);
        for (Eigen::Index t = 0; t < s; ++t) {
            std::uint64_t g = gid(n, t);
            if (kind == ModelKind::O1) {
                ops.diag(t) = onsite_o1(g);
            } else {
                auto [up, dn] = onsite_su2(g);
                ops.diag(2 * t) = up;
                ops.diag(2 * t + 1) = dn;
            }
        }
        auto push_pair = [&](Eigen::Index ta, Eigen::Index tb) {
            std::uint64_t ga = gid(n, ta), gb = gid(n, tb);
            if (kind == ModelKind::O1) {
                ops.row.push_back(int(ta));
                ops.col.push_back(int(tb));
                ops.val.push_back(bond_o1(ga, gb));
                ops.row.push_back(int(tb));
                ops.col.push_back(int(ta));
                ops.val.push_back(bond_o1(gb, ga));
            } else {
                Eigen::Matrix2cd rab = bond_su2(ga, gb), rba = bond_su2(gb, ga);
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) {
                        ops.row.push_back(int(2 * ta + a));
                        ops.col.push_back(int(2 * tb + b));
                        ops.val.push_back(rab(a, b));
                        ops.row.push_back(int(2 * tb + a));
                        ops.col.push_back(int(2 * ta + b));
                        ops.val.push_back(rba(a, b));
                    }
            }
        };
        const Eigen::Index l = lattice.l;
        auto wrap = [&](Eigen::Index x) { return (x + l) % l; };
        if (lattice.d == 2) {
            for (Eigen::Index x = 0; x < l; ++x) {
                if (x + 1 < l || lattice.transverse_periodic) push_pair(x, wrap(x + 1));
            }
        } else {
            for (Eigen::Index y = 0; y < l; ++y)
                for (Eigen::Index x = 0; x < l; ++x) {
                    Eigen::Index t = x + l * y;
                    if (x + 1 < l || lattice.transverse_periodic)
                        push_pair(t, wrap(x + 1) + l * y);
                    if (y + 1 < l || lattice.transverse_periodic)
                        push_pair(t, x + l * wrap(y + 1));
                }
        }
        return ops;
    }

    LinkOps link_ops(Eigen::Index n) const {
        const Eigen::Index s = sites();
        Eigen::Index next = n + 1;
        if (lattice.role == Role::ClosedPeriodic) next = (n + 1) % lattice.lz;
        LinkOps ops;
        if (kind == ModelKind::O1) {
            ops.form = HopForm::DiagPM1;
            ops.sgn_g.resize(size_t(s));
            ops.sgn_f.resize(size_t(s));
            for (Eigen::Index t = 0; t < s; ++t) {
                std::uint64_t gi = gid(n, t), gj = gid(next, t);
                ops.sgn_g[size_t(t)] = bond_o1(gi, gj);
                ops.sgn_f[size_t(t)] = bond_o1(gj, gi);
            }
        } else {
            ops.form = HopForm::SU2Blocks;
            ops.blk_g.resize(size_t(s));
            ops.blk_f.resize(size_t(s));
            for (Eigen::Index t = 0; t < s; ++t) {
                std::uint64_t gi = gid(n, t), gj = gid(next, t);
                ops.blk_g[size_t(t)] = bond_su2(gi, gj);
                ops.blk_f[size_t(t)] = bond_su2(gj, gi);
            }
        }
        return ops;
    }

    // ---- dense views -------------------------------------------------------

    Mat slice_matrix(Eigen::Index n) const {
        SliceOps ops = slice_ops(n);
        Eigen::Index b = slice_dim();
        Mat h = Mat::Zero(b, b);
        h.diagonal() = ops.diag;
        for (size_t k = 0; k < ops.val.size(); ++k) h(ops.row[k], ops.col[k]) += ops.val[k];
        return h;
    }

    Mat g_matrix(Eigen::Index n) const { return link_dense(n, true); }
    Mat f_matrix(Eigen::Index n) const { return link_dense(n, false); }

    Mat assemble_full(Eigen::Index cap = 8192) const {
        if (lattice.role != Role::ClosedPeriodic)
            throw std::invalid_argument("assemble_full needs a closed-periodic geometry");
        const Eigen::Index b = slice_dim(), nz = lattice.lz, n_total = b * nz;
        if (n_total > cap)
            throw std::invalid_argument("assembled dimension " + std::to_string(n_total) +
                                        " exceeds the dense cap " + std::to_string(cap));
        Mat h = Mat::Zero(n_total, n_total);
        for (Eigen::Index n = 0; n < nz; ++n) {
            SliceOps ops = slice_ops(n);
            h.block(n * b, n * b, b, b).diagonal() = ops.diag;
            for (size_t k = 0; k < ops.val.size(); ++k)
                h(n * b + ops.row[k], n * b + ops.col[k]) += ops.val[k];
            Eigen::Index next = (n + 1) % nz;
            h.block(n * b, next * b, b, b) += link_dense(n, true);
            h.block(next * b, n * b, b, b) += link_dense(n, false);
        }
        return h;
    }

  private:
    Mat link_dense(Eigen::Index n, bool forward) const {
        LinkOps ops = link_ops(n);
        Eigen::Index b = slice_dim();
        Mat m = Mat::Zero(b, b);
        if (ops.form == HopForm::DiagPM1) {
            const auto& sgn = forward ? ops.sgn_g : ops.sgn_f;
            for (Eigen::Index t = 0; t < b; ++t) m(t, t) = sgn[size_t(t)];
        } else {
            const auto& blk = forward ? ops.blk_g : ops.blk_f;
            for (size_t t = 0; t < blk.size(); ++t)
                m.block(2 * Eigen::Index(t), 2 * Eigen::Index(t), 2, 2) = blk[t];
        }
        return m;
    }
};

inline ModelInstance build_o1(const LatticeSpec& lattice, double w, std::uint64_t seed) {
    lattice.validate();
    if (w < 0) throw std::invalid_argument("disorder strength must be non-negative");
    ModelInstance m;
    m.lattice = lattice;
    m.disorder.w = w;
    m.tag = ClassTag::of("AI");
    m.seed = seed;
    m.kind = ModelKind::O1;
    return m;
}

inline ModelInstance build_su2(const LatticeSpec& lattice, const DisorderSpec& disorder,
                               const ClassTag& tag, std::uint64_t seed) {
    lattice.validate();
    bool chiral = tag.name == "CIIdag" || tag.name == "DIII";
    bool plain = tag.name == "AII" || tag.name == "AIIdag";
    if (!chiral && !plain)
        throw std::invalid_argument("SU(2) model supports AII, AIIdag, CIIdag, DIII; got " +
                                    tag.name);
    if (disorder.w_r < 0 || disorder.w_i < 0)
        throw std::invalid_argument("disorder strengths must be non-negative");
    if (chiral && disorder.w_r != 0)
        throw std::invalid_argument(tag.name + " needs purely imaginary on-site disorder (w_r = 0)");
    if (chiral && disorder.w_i <= 0)
        throw std::invalid_argument(tag.name + " needs w_i > 0");
    if (tag.name == "CIIdag") {
        bool even_l = lattice.l % 2 == 0;
        if (lattice.transverse_periodic && !even_l)
            throw std::invalid_argument("CIIdag on a periodic lattice needs even L (bipartite)");
        if (lattice.role == Role::ClosedPeriodic && lattice.lz % 2 != 0)
            throw std::invalid_argument("CIIdag on a closed lattice needs even length (bipartite)");
    }
    ModelInstance m;
    m.lattice = lattice;
    m.disorder = disorder;
    m.tag = tag;
    m.seed = seed;
    m.kind = ModelKind::SU2;
    return m;
}

// Symmetry operations of the model's class on an n_slices-long chunk of the
// chain (open along z, so the relations hold for any truncation).
inline std::vector<symmetry::SymmetryOp> class_ops(const ModelInstance& m,
                                                   Eigen::Index n_slices) {
    const Eigen::Index b = m.slice_dim(), n_total = b * n_slices;
    std::vector<symmetry::SymmetryOp> ops;
    if (m.kind == ModelKind::O1) {
        ops.push_back(symmetry::SymmetryOp::trs(Mat::Identity(n_total, n_total), +1));
        return ops;
    }
    Mat sy = Mat::Zero(n_total, n_total);
    Mat sx = Mat::Zero(n_total, n_total);
    for (Eigen::Index p = 0; p < n_total; p += 2) {
        sy(p, p + 1) = cplx(0, -1);
        sy(p + 1, p) = cplx(0, 1);
        sx(p, p + 1) = 1;
        sx(p + 1, p) = 1;
    }
    if (m.tag.name == "AII") {
        ops.push_back(symmetry::SymmetryOp::trs(sy, -1));
    } else if (m.tag.name == "AIIdag") {
        ops.push_back(symmetry::SymmetryOp::trs_dag(sy, -1));
    } else if (m.tag.name == "DIII") {
        ops.push_back(symmetry::SymmetryOp::trs(sy, -1));
        ops.push_back(symmetry::SymmetryOp::phs(sx, +1));
    } else {  // CIIdag
        ops.push_back(symmetry::SymmetryOp::trs_dag(sy, -1));
        Mat mzy = Mat::Zero(n_total, n_total);
        const Eigen::Index s = m.sites(), l = m.lattice.l;
        for (Eigen::Index n = 0; n < n_slices; ++n)
            for (Eigen::Index t = 0; t < s; ++t) {
                Eigen::Index x = t % l, y = m.lattice.d == 3 ? t / l : 0;
                double mu = ((x + y + n) % 2 == 0) ? 1.0 : -1.0;
                Eigen::Index p = n * b + 2 * t;
                mzy(p, p + 1) = mu * cplx(0, -1);
                mzy(p + 1, p) = mu * cplx(0, 1);
            }
        ops.push_back(symmetry::SymmetryOp::phs_dag(mzy, -1));
    }
    return ops;
}

// Open-chain assembly of the first n_slices slices; the class relations hold
// on any such truncation, so tests verify builds without a closed box.
inline Mat assemble_chain(const ModelInstance& m, Eigen::Index n_slices) {
    const Eigen::Index b = m.slice_dim(), n_total = b * n_slices;
    Mat h = Mat::Zero(n_total, n_total);
    for (Eigen::Index n = 0; n < n_slices; ++n) {
        SliceOps ops = m.slice_ops(n);
        h.block(n * b, n * b, b, b).diagonal() = ops.diag;
        for (size_t k = 0; k < ops.val.size(); ++k)
            h(n * b + ops.row[k], n * b + ops.col[k]) += ops.val[k];
        if (n + 1 < n_slices) {
            h.block(n * b, (n + 1) * b, b, b) += m.g_matrix(n);
            h.block((n + 1) * b, n * b, b, b) += m.f_matrix(n);
        }
    }
    return h;
}

}  // namespace andloc::model
