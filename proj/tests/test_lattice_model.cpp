#include <catch2/catch_amalgamated.hpp>

#include <andloc/model.hpp>
#include <andloc/symmetry.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace andloc;
using Catch::Approx;

namespace {

model::LatticeSpec lat3(Eigen::Index l, Eigen::Index lz, bool periodic = true) {
    model::LatticeSpec s;
    s.d = 3;
    s.l = l;
    s.lz = lz;
    s.transverse_periodic = periodic;
    return s;
}

model::LatticeSpec lat2(Eigen::Index l, Eigen::Index lz, bool periodic = true) {
    model::LatticeSpec s;
    s.d = 2;
    s.l = l;
    s.lz = lz;
    s.transverse_periodic = periodic;
    return s;
}

model::DisorderSpec su2_disorder(double wr, double wi) {
    model::DisorderSpec d;
    d.w_r = wr;
    d.w_i = wi;
    return d;
}

}  // namespace

TEST_CASE("real hopping model: zero-disorder structure") {
    auto lat = lat3(4, 4);
    lat.role = model::Role::ClosedPeriodic;
    auto m = model::build_o1(lat, 0.0, 5);
    Mat h = m.assemble_full();
    REQUIRE(h.rows() == 64);
    REQUIRE(h.imag().cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index j = 0; j < h.cols(); ++j)
        for (Eigen::Index i = 0; i < h.rows(); ++i) {
            double v = h(i, j).real();
            if (i == j) {
                REQUIRE(v == 0.0);  // zero on-site disorder
            } else {
                REQUIRE((v == 0.0 || v == 1.0 || v == -1.0));
            }
        }
}

TEST_CASE("real hopping model: class relation is exact") {
    auto m = model::build_o1(lat3(4, 8), 21.54, 7);
    REQUIRE(m.tag.name == "AI");
    REQUIRE(m.tag.energy == symmetry::EnergyKind::Real);
    Mat h = model::assemble_chain(m, 4);
    REQUIRE((h - h.conjugate()).norm() == 0.0);
    for (const auto& op : model::class_ops(m, 4)) {
        auto rep = symmetry::verify(h, op, 1e-12);
        REQUIRE(rep.holds);
        REQUIRE(rep.relation_residual == 0.0);
    }
}

TEST_CASE("open 2x2 slice has exactly eight directed bonds") {
    auto m = model::build_o1(lat3(2, 4, false), 5.0, 9);
    REQUIRE(m.slice_dim() == 4);
    Mat s = m.slice_matrix(0);
    int nonzero_offdiag = 0;
    for (Eigen::Index j = 0; j < 4; ++j)
        for (Eigen::Index i = 0; i < 4; ++i)
            if (i != j && s(i, j) != cplx(0, 0)) ++nonzero_offdiag;
    REQUIRE(nonzero_offdiag == 8);
}

TEST_CASE("periodic wrap at L = 2 doubles every bond coherently") {
    auto lat = lat2(2, 2);
    lat.role = model::Role::ClosedPeriodic;
    auto m = model::build_o1(lat, 0.0, 13);
    Mat h = m.assemble_full();
    REQUIRE(h.rows() == 4);
    REQUIRE(h.imag().cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
        double row = 0;
        for (Eigen::Index j = 0; j < 4; ++j)
            if (i != j) row += std::abs(h(i, j));
        REQUIRE(row == Approx(4.0));
    }
}

TEST_CASE("spin-half hopping blocks are special unitary and reciprocal") {
    auto check_blocks = [](const model::ModelInstance& m, bool diii) {
        for (std::uint64_t t = 0; t < 40; ++t) {
            std::uint64_t gi = 3 * t + 1, gj = 7 * t + 2;
            if (gi == gj) continue;
            Eigen::Matrix2cd r = m.bond_su2(gi, gj);
            REQUIRE((r.adjoint() * r - Eigen::Matrix2cd::Identity()).norm() < 1e-14);
            REQUIRE(std::abs(r.determinant() - cplx(1, 0)) < 1e-14);
            Eigen::Matrix2cd back = m.bond_su2(gj, gi);
            if (diii) {
                Eigen::Matrix2cd sz = pauli_z();
                REQUIRE((back + sz * r.adjoint() * sz).norm() < 1e-14);
            } else {
                REQUIRE((back - r.adjoint()).norm() < 1e-14);
            }
        }
    };
    check_blocks(model::build_su2(lat2(4, 8), su2_disorder(1, 1), model::ClassTag::of("AII"), 3),
                 false);
    check_blocks(
        model::build_su2(lat2(4, 8), su2_disorder(1, 1), model::ClassTag::of("AIIdag"), 3), false);
    check_blocks(model::build_su2(lat2(4, 8), su2_disorder(0, 1), model::ClassTag::of("DIII"), 3),
                 true);
}

TEST_CASE("spin-half models satisfy their class relations on every build") {
    struct Case {
        const char* name;
        model::DisorderSpec dis;
    };
    const Case cases[] = {{"AII", su2_disorder(1.0, 1.0)},
                          {"AIIdag", su2_disorder(7.706, 7.706)},
                          {"CIIdag", su2_disorder(0.0, 6.192)},
                          {"DIII", su2_disorder(0.0, 6.193)}};
    for (const auto& c : cases) {
        for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
            auto m = model::build_su2(lat2(4, 6), c.dis, model::ClassTag::of(c.name), seed);
            Mat h = model::assemble_chain(m, 3);
            for (const auto& op : model::class_ops(m, 3)) {
                INFO(c.name << " seed " << seed << " op "
                            << symmetry::to_string(op.kind));
                auto rep = symmetry::verify(h, op, 1e-12);
                CHECK(rep.relation_residual < 1e-12);
                REQUIRE(rep.holds);
            }
        }
        // 3D variant
        auto m3 = model::build_su2(lat3(2, 4), c.dis, model::ClassTag::of(c.name), 4);
        Mat h3 = model::assemble_chain(m3, 3);
        for (const auto& op : model::class_ops(m3, 3))
            REQUIRE(symmetry::verify(h3, op, 1e-12).holds);
    }
}

TEST_CASE("transposed realizations stay inside the ensemble") {
    // reciprocity at the ensemble level: H^T satisfies the same class relation
    auto mo = model::build_o1(lat3(4, 6), 12.0, 21);
    Mat ho = model::assemble_chain(mo, 3).transpose();
    REQUIRE(symmetry::verify(ho, symmetry::SymmetryOp::trs(Mat::Identity(ho.rows(), ho.cols()), +1))
                .holds);

    auto ms = model::build_su2(lat2(4, 6), su2_disorder(1, 1), model::ClassTag::of("AII"), 22);
    Mat hs = model::assemble_chain(ms, 3);
    auto ops = model::class_ops(ms, 3);
    REQUIRE(symmetry::verify(Mat(hs.transpose()), ops[0]).holds);
}

TEST_CASE("on-site draws respect their bounds and distribution") {
    const double w = 10.0;
    auto m = model::build_o1(lat3(4, 4), w, 31);
    const int n = 100000;
    std::vector<double> draws;
    draws.reserve(n);
    for (int g = 0; g < n; ++g) {
        double e = m.onsite_o1(std::uint64_t(g));
        REQUIRE(std::abs(e) <= w / 2);
        draws.push_back(e);
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    for (int i = 0; i < n; ++i) {
        double f = (draws[size_t(i)] + w / 2) / w;
        ks = std::max(ks, std::abs(f - double(i + 1) / n));
        ks = std::max(ks, std::abs(f - double(i) / n));
    }
    REQUIRE(ks < 0.01);
}

TEST_CASE("hopping angle beta follows the sin(2 beta) law") {
    auto st = rng::Stream::keyed(17, rng::Tag::BondAngles, 0);
    const int n = 1000000;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        double beta = st.su2_beta();
        REQUIRE(beta >= 0.0);
        REQUIRE(beta <= 1.5707963267948966 + 1e-12);
        double c = std::cos(beta);
        sum += c * c;
    }
    REQUIRE(sum / n == Approx(0.5).margin(0.002));
}

TEST_CASE("per-class on-site structure") {
    // AII: complex-conjugate spin pair; AIIdag/CIIdag: equal; DIII: staggered imaginary
    auto maii = model::build_su2(lat2(4, 4), su2_disorder(1, 1), model::ClassTag::of("AII"), 8);
    for (std::uint64_t g = 0; g < 32; ++g) {
        auto [up, dn] = maii.onsite_su2(g);
        REQUIRE(dn == std::conj(up));
        REQUIRE(std::abs(up.real()) <= 0.5);
        REQUIRE(std::abs(up.imag()) <= 0.5);
    }
    auto mdag = model::build_su2(lat2(4, 4), su2_disorder(1, 1), model::ClassTag::of("AIIdag"), 8);
    for (std::uint64_t g = 0; g < 32; ++g) {
        auto [up, dn] = mdag.onsite_su2(g);
        REQUIRE(dn == up);
    }
    auto mdiii = model::build_su2(lat2(4, 4), su2_disorder(0, 1), model::ClassTag::of("DIII"), 8);
    for (std::uint64_t g = 0; g < 32; ++g) {
        auto [up, dn] = mdiii.onsite_su2(g);
        REQUIRE(up.real() == 0.0);
        REQUIRE(dn == -up);
    }
}

TEST_CASE("identical parameters give bit-identical builds") {
    auto a = model::build_su2(lat2(4, 6), su2_disorder(1, 2), model::ClassTag::of("AII"), 77);
    auto b = model::build_su2(lat2(4, 6), su2_disorder(1, 2), model::ClassTag::of("AII"), 77);
    Mat ha = model::assemble_chain(a, 4), hb = model::assemble_chain(b, 4);
    REQUIRE((ha.array() == hb.array()).all());

    auto c = model::build_su2(lat2(4, 6), su2_disorder(1, 2), model::ClassTag::of("AII"), 78);
    Mat hc = model::assemble_chain(c, 4);
    REQUIRE((ha - hc).norm() > 0.0);
}

TEST_CASE("hermitian limit of the reciprocal model") {
    auto m = model::build_su2(lat2(4, 6), su2_disorder(1.0, 0.0), model::ClassTag::of("AIIdag"), 5);
    Mat h = model::assemble_chain(m, 4);
    REQUIRE((h - h.adjoint()).norm() == 0.0);
}

TEST_CASE("inter-slice hoppings are invertible") {
    auto mo = model::build_o1(lat3(4, 4), 8.0, 2);
    REQUIRE(std::abs(std::abs(mo.g_matrix(0).determinant()) - 1.0) < 1e-12);
    auto ms = model::build_su2(lat2(4, 4), su2_disorder(1, 1), model::ClassTag::of("AII"), 2);
    REQUIRE(std::abs(ms.g_matrix(1).determinant() - cplx(1, 0)) < 1e-10);
}

TEST_CASE("full assembly honours the dense cap") {
    auto lat = lat3(16, 16);
    lat.role = model::Role::ClosedPeriodic;
    auto m = model::build_su2(lat, su2_disorder(1, 1), model::ClassTag::of("AII"), 1);
    REQUIRE(m.slice_dim() * m.lattice.lz == 8192);
    REQUIRE_THROWS_AS(m.assemble_full(4096), std::invalid_argument);

    auto open = model::build_su2(lat2(4, 8), su2_disorder(1, 1), model::ClassTag::of("AII"), 1);
    REQUIRE_THROWS_AS(open.assemble_full(), std::invalid_argument);
}

TEST_CASE("builder validation") {
    REQUIRE_THROWS_AS(model::build_o1(lat3(4, 4), -1.0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(model::build_su2(lat2(4, 4), su2_disorder(1, 1), model::ClassTag::of("AI"), 0),
                      std::invalid_argument);
    // purely imaginary on-site disorder is part of the chiral class definitions
    REQUIRE_THROWS_AS(
        model::build_su2(lat2(4, 4), su2_disorder(0.5, 1), model::ClassTag::of("CIIdag"), 0),
        std::invalid_argument);
    REQUIRE_THROWS_AS(
        model::build_su2(lat2(4, 4), su2_disorder(0, 0), model::ClassTag::of("DIII"), 0),
        std::invalid_argument);
    // bipartite staggering needs an even periodic edge
    REQUIRE_THROWS_AS(
        model::build_su2(lat2(5, 4), su2_disorder(0, 1), model::ClassTag::of("CIIdag"), 0),
        std::invalid_argument);

    model::LatticeSpec bad = lat3(4, 4);
    bad.d = 4;
    REQUIRE_THROWS_AS(model::build_o1(bad, 1.0, 0), std::invalid_argument);
    model::LatticeSpec tiny = lat3(1, 4);
    REQUIRE_THROWS_AS(model::build_o1(tiny, 1.0, 0), std::invalid_argument);
    model::LatticeSpec closed = lat3(4, 6);
    closed.role = model::Role::ClosedPeriodic;
    REQUIRE_THROWS_AS(model::build_o1(closed, 1.0, 0), std::invalid_argument);
}
