#include <catch2/catch_amalgamated.hpp>

#include <andloc/construct.hpp>
#include <andloc/symmetry.hpp>

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

using namespace andloc;
using symmetry::ConstructInput;
using symmetry::construct_from_hermitian;

namespace {

struct Prepared {
    ConstructInput input;
    Vec psi;  // eigenvector of input.h at input.e_ref
};

Mat gaussian(Eigen::Index rows, Eigen::Index cols, rng::Stream& st, bool real) {
    Mat g(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            g(i, j) = real ? cplx(st.normal(), 0) : cplx(st.normal(), st.normal());
    return g;
}

// any Hermitian matrix, eigenpair from the middle of the spectrum
Prepared make_generic(Eigen::Index n, std::uint64_t seed) {
    auto st = rng::Stream::keyed(seed, rng::Tag::Synthetic, 10);
    Mat g = gaussian(n, n, st, false);
    Prepared p;
    p.input.h = (g + g.adjoint()) / 2;
    Eigen::SelfAdjointEigenSolver<Mat> es(p.input.h);
    p.input.e_ref = es.eigenvalues()(n / 2);
    p.psi = es.eigenvectors().col(n / 2);
    return p;
}

// diag-form input: V h* V^+ = h with V = diag(1_{n1}, -1_{n2})
Prepared make_ai_diag(Eigen::Index n1, Eigen::Index n2, std::uint64_t seed) {
    auto st = rng::Stream::keyed(seed, rng::Tag::Synthetic, 11);
    Eigen::Index n = n1 + n2;
    Mat a = gaussian(n1, n1, st, true), b = gaussian(n2, n2, st, true);
    Mat c = gaussian(n1, n2, st, true);
    Prepared p;
    p.input.h = Mat::Zero(n, n);
    p.input.h.block(0, 0, n1, n1) = (a + a.transpose()) / 2;
    p.input.h.block(n1, n1, n2, n2) = (b + b.transpose()) / 2;
    p.input.h.block(0, n1, n1, n2) = cplx(0, 1) * c;
    p.input.h.block(n1, 0, n2, n1) = cplx(0, -1) * c.transpose();
    p.input.split = int(n1);
    Eigen::SelfAdjointEigenSolver<Mat> es(p.input.h);
    p.input.e_ref = es.eigenvalues()(n / 2);
    p.psi = es.eigenvectors().col(n / 2);
    return p;
}

// swap-form input: V = [[0,1],[1,0]] on the two halves
Prepared make_ai_swap(Eigen::Index m, std::uint64_t seed) {
    auto st = rng::Stream::keyed(seed, rng::Tag::Synthetic, 12);
    Mat g1 = gaussian(m, m, st, false), g2 = gaussian(m, m, st, false);
    Mat h11 = (g1 + g1.adjoint()) / 2;
    Mat h12 = (g2 + g2.transpose()) / 2;  // complex symmetric
    Prepared p;
    p.input.h = Mat::Zero(2 * m, 2 * m);
    p.input.h.block(0, 0, m, m) = h11;
    p.input.h.block(0, m, m, m) = h12;
    p.input.h.block(m, 0, m, m) = h12.adjoint();
    p.input.h.block(m, m, m, m) = h11.conjugate();
    p.input.swap_form = true;
    Eigen::SelfAdjointEigenSolver<Mat> es(p.input.h);
    p.input.e_ref = es.eigenvalues()(m);
    p.psi = es.eigenvectors().col(m);
    return p;
}

// chiral form [[0, h1], [h1^+, 0]] with an engineered null pair, so the
// supplied null vector has weight in both chirality sectors
Prepared make_chiral(Eigen::Index m, std::uint64_t seed, bool real) {
    auto st = rng::Stream::keyed(seed, rng::Tag::Synthetic, real ? 14 : 13);
    Mat b = gaussian(m, m, st, real);
    Vec u = gaussian(m, 1, st, real), v = gaussian(m, 1, st, real);
    u.normalize();
    v.normalize();
    Mat id = Mat::Identity(m, m);
    Mat h1 = (id - u * u.adjoint()) * b * (id - v * v.adjoint());
    Prepared p;
    p.input.h = Mat::Zero(2 * m, 2 * m);
    p.input.h.block(0, m, m, m) = h1;
    p.input.h.block(m, 0, m, m) = h1.adjoint();
    p.input.e_ref = 0.0;
    p.psi = Vec::Zero(2 * m);
    p.psi.segment(0, m) = u;
    p.psi.segment(m, m) = v;
    p.psi /= std::sqrt(2.0);
    return p;
}

void check_output(const std::string& recipe, const symmetry::Constructed& out,
                  const std::vector<Prepared>& prep, const std::string& input_class) {
    INFO("recipe " << recipe);
    REQUIRE(out.record != nullptr);
    REQUIRE(std::string(out.record->name) == symmetry::class_record(recipe).name);

    for (const auto& op : out.ops) {
        INFO("op kind " << symmetry::to_string(op.kind));
        auto rep = symmetry::verify(out.h, op, 1e-12);
        CHECK(rep.relation_residual < 1e-12);
        CHECK(rep.unitary_residual < 1e-12);
        CHECK(rep.structure_residual < 1e-12);
        REQUIRE(rep.holds);
    }

    auto res = symmetry::classify(out.h, out.ops);
    REQUIRE(res.record != nullptr);
    REQUIRE(std::string(res.record->name) == out.record->name);

    // the Hermitization counterpart of the target class is the input class
    const auto& back = symmetry::counterpart(*out.record, symmetry::kind_of_energy(out.energy));
    REQUIRE(std::string(back.hermitian_class) == input_class);

    const Eigen::Index n_out = out.h.rows();
    Mat shifted = out.h - out.energy * Mat::Identity(n_out, n_out);
    REQUIRE_FALSE(out.modes.empty());
    for (const auto& mode : out.modes) {
        REQUIRE(mode.input < int(prep.size()));
        const Vec& psi = prep[size_t(mode.input)].psi;
        Vec phi = mode.map * (mode.conjugate ? psi.conjugate().eval() : psi);
        INFO("mode from input " << mode.input << (mode.conjugate ? " (conjugated)" : ""));
        REQUIRE(phi.norm() > 1e-3);
        REQUIRE((shifted * phi).norm() / phi.norm() < 1e-9);
    }
}

}  // namespace

TEST_CASE("single-input constructions from a generic Hermitian matrix") {
    for (auto [recipe, n] : {std::pair<const char*, Eigen::Index>{"AIII", 6},
                             {"BDI+S-+", 5},
                             {"CI+S-+", 6}}) {
        Prepared p = make_generic(n, 100 + size_t(n));
        cplx e = std::string(recipe) == "AIII" ? cplx(0, 0.3) : cplx(0, 0);
        auto out = construct_from_hermitian(recipe, {p.input}, e);
        REQUIRE(out.energy == e);
        check_output(recipe, out, {p}, "A");
    }
}

TEST_CASE("two-input construction from generic Hermitian matrices") {
    Prepared p0 = make_generic(6, 201), p1 = make_generic(6, 202);
    auto out = construct_from_hermitian("AIII+S-", {p0.input, p1.input});
    check_output("AIII+S-", out, {p0, p1}, "A");
}

TEST_CASE("constructions from real-constrained Hermitian inputs") {
    SECTION("swap form") {
        Prepared p = make_ai_swap(4, 301);
        auto out = construct_from_hermitian("CI", {p.input});
        check_output("CI", out, {p}, "AI");
    }
    SECTION("unbalanced diag form") {
        Prepared p = make_ai_diag(3, 5, 302);
        auto out = construct_from_hermitian("BDIdag", {p.input}, cplx(0, 0.25));
        REQUIRE(out.energy == cplx(0, 0.25));
        check_output("BDIdag", out, {p}, "AI");
    }
    SECTION("two diag-form inputs") {
        Prepared p0 = make_ai_diag(4, 4, 303), p1 = make_ai_diag(4, 4, 304);
        auto out = construct_from_hermitian("CI+S+-", {p0.input, p1.input});
        check_output("CI+S+-", out, {p0, p1}, "AI");
    }
}

TEST_CASE("constructions from chiral-form inputs") {
    SECTION("two chiral inputs") {
        Prepared p0 = make_chiral(4, 401, false), p1 = make_chiral(4, 402, false);
        auto out = construct_from_hermitian("AIIIdag", {p0.input, p1.input});
        check_output("AIIIdag", out, {p0, p1}, "AIII");
    }
    for (auto [recipe, m] : {std::pair<const char*, Eigen::Index>{"AIII+S+", 4},
                             {"D+S+", 3},
                             {"C+S+", 4},
                             {"AI+S-", 3}}) {
        DYNAMIC_SECTION("single chiral input for " << recipe) {
            Prepared p = make_chiral(m, 410 + size_t(m), false);
            auto out = construct_from_hermitian(recipe, {p.input});
            check_output(recipe, out, {p}, "AIII");
        }
    }
}

TEST_CASE("constructions from real chiral inputs") {
    SECTION("two real chiral inputs give a real output") {
        Prepared p0 = make_chiral(3, 501, true), p1 = make_chiral(3, 502, true);
        auto out = construct_from_hermitian("AI+S+", {p0.input, p1.input});
        check_output("AI+S+", out, {p0, p1}, "BDI");
        REQUIRE(out.h.imag().cwiseAbs().maxCoeff() < 1e-14);
    }
    for (auto [recipe, m] :
         {std::pair<const char*, Eigen::Index>{"BDI+S++", 3}, {"CI+S++", 4}}) {
        DYNAMIC_SECTION("single real chiral input for " << recipe) {
            Prepared p = make_chiral(m, 510 + size_t(m), true);
            auto out = construct_from_hermitian(recipe, {p.input});
            check_output(recipe, out, {p}, "BDI");
        }
    }
}

TEST_CASE("degenerate zero input") {
    ConstructInput zero;
    zero.h = Mat::Zero(2, 2);
    auto out = construct_from_hermitian("AIII", {zero});
    REQUIRE(out.h.norm() == 0.0);
    for (const auto& op : out.ops) REQUIRE(symmetry::verify(out.h, op).holds);
}

TEST_CASE("construction rejects bad inputs") {
    SECTION("unsupported target") {
        Prepared p = make_generic(4, 601);
        REQUIRE_THROWS_AS(construct_from_hermitian("AII+S+", {p.input}), std::invalid_argument);
    }
    SECTION("wrong input count") {
        Prepared p = make_generic(4, 602);
        REQUIRE_THROWS_AS(construct_from_hermitian("AIII", {p.input, p.input}),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(construct_from_hermitian("AIIIdag", {p.input}), std::invalid_argument);
    }
    SECTION("non-Hermitian input") {
        auto st = rng::Stream::keyed(603, rng::Tag::Synthetic, 0);
        ConstructInput in;
        in.h = gaussian(4, 4, st, false);
        REQUIRE_THROWS_AS(construct_from_hermitian("AIII", {in}), std::invalid_argument);
    }
    SECTION("symmetry-breaking energy") {
        Prepared p = make_generic(4, 604);
        REQUIRE_THROWS_AS(construct_from_hermitian("AIII", {p.input}, cplx(0.1, 0)),
                          std::invalid_argument);
        REQUIRE_THROWS_AS(construct_from_hermitian("AIII+S-", {p.input, p.input}, cplx(0, 0.1)),
                          std::invalid_argument);
    }
    SECTION("odd dimension where halves are required") {
        Prepared p = make_generic(5, 605);
        REQUIRE_THROWS_AS(construct_from_hermitian("CI+S-+", {p.input}), std::invalid_argument);
    }
    SECTION("input not in the required real form") {
        Prepared p = make_generic(8, 606);  // generic Hermitian, not AI form
        REQUIRE_THROWS_AS(construct_from_hermitian("BDIdag", {p.input}), std::invalid_argument);
    }
    SECTION("chiral input with a nonzero reference energy") {
        Prepared p = make_chiral(4, 607, false);
        p.input.e_ref = 0.5;
        REQUIRE_THROWS_AS(construct_from_hermitian("AIII+S+", {p.input}), std::invalid_argument);
    }
    SECTION("complex input where a real one is required") {
        Prepared p = make_chiral(4, 608, false);
        REQUIRE_THROWS_AS(construct_from_hermitian("BDI+S++", {p.input}), std::invalid_argument);
    }
}
