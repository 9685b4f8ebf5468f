#include <catch2/catch_amalgamated.hpp>

#include <andloc/spectra.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

using namespace andloc;
using Catch::Approx;

namespace {

std::vector<cplx> sorted_complex(const Vec& v, bool conjugate = false) {
    std::vector<cplx> out(v.data(), v.data() + v.size());
    if (conjugate)
        for (auto& x : out) x = std::conj(x);
    std::sort(out.begin(), out.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return out;
}

}  // namespace

TEST_CASE("participation ratio of simple states") {
    Vec basis = Vec::Zero(16);
    basis(5) = cplx(0, 1);
    REQUIRE(spectra::ipr(basis) == 1.0);

    Vec flat = Vec::Constant(4, cplx(0.5, 0));
    REQUIRE(spectra::ipr(flat) == 0.25);

    Vec scaled = 3.7 * flat;  // normalization-independent
    REQUIRE(spectra::ipr(scaled) == Approx(0.25).epsilon(1e-14));

    REQUIRE_THROWS_AS(spectra::ipr(Vec::Zero(4)), std::invalid_argument);
}

TEST_CASE("participation ratio of random states follows Porter-Thomas") {
    const Eigen::Index n = 64;
    auto st = rng::Stream::keyed(7, rng::Tag::Synthetic, 2);
    double sum = 0;
    const int reps = 2000;
    for (int r = 0; r < reps; ++r) {
        Vec psi(n);
        for (Eigen::Index i = 0; i < n; ++i) psi(i) = cplx(st.normal(), st.normal());
        sum += spectra::ipr(psi);
    }
    REQUIRE(sum / reps == Approx(2.0 / double(n + 1)).epsilon(0.05));
}

TEST_CASE("dense diagonalization basics") {
    Mat d = Mat::Zero(2, 2);
    d(0, 0) = cplx(1, 2);
    d(1, 1) = cplx(-3, 0);
    auto sp = spectra::diagonalize(d, false);
    auto ev = sorted_complex(sp.eigenvalues);
    REQUIRE(std::abs(ev[0] - cplx(-3, 0)) < 1e-14);
    REQUIRE(std::abs(ev[1] - cplx(1, 2)) < 1e-14);

    Mat j = Mat::Zero(2, 2);  // eigenvalues +-sqrt(eps)
    j(0, 1) = 1;
    j(1, 0) = 1e-6;
    auto je = sorted_complex(spectra::diagonalize(j, false).eigenvalues);
    REQUIRE(std::abs(je[0] - cplx(-1e-3, 0)) < 1e-12);
    REQUIRE(std::abs(je[1] - cplx(1e-3, 0)) < 1e-12);

    REQUIRE_THROWS_AS(spectra::diagonalize(Mat::Zero(2, 3), false), std::invalid_argument);
    REQUIRE_THROWS_AS(spectra::diagonalize(Mat::Zero(9, 9), false, 8), std::invalid_argument);
}

TEST_CASE("eigenvalue identities on a dense non-normal matrix") {
    Mat h = spectra::ginibre(spectra::Ginibre::GinUE, 64, 9);
    auto sp = spectra::diagonalize(h, true);
    REQUIRE(sp.max_residual < 1e-12);
    REQUIRE(sp.vectors.has_value());
    REQUIRE(sp.ipr_vals.has_value());

    cplx sum = 0;
    for (Eigen::Index i = 0; i < 64; ++i) sum += sp.eigenvalues(i);
    REQUIRE(std::abs(sum - h.trace()) < 1e-10);

    auto adj = spectra::diagonalize(Mat(h.adjoint()), false);
    auto a = sorted_complex(sp.eigenvalues);
    auto b = sorted_complex(adj.eigenvalues, true);
    for (size_t i = 0; i < a.size(); ++i) REQUIRE(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("counting real eigenvalues") {
    Vec ev(4);
    ev(0) = cplx(2, 0);
    ev(1) = cplx(1, 1e-11);   // below the relative tolerance
    ev(2) = cplx(0, 1);
    ev(3) = cplx(-1, -0.5);
    REQUIRE(spectra::count_real(ev) == 2);
    REQUIRE(spectra::count_real(ev, 1e-12) == 1);
}

TEST_CASE("density histogram of the imaginary parts") {
    spectra::SpectrumResult a, b;
    a.eigenvalues = Vec(2);
    a.eigenvalues << cplx(0.3, 0), cplx(-0.1, 1);
    b.eigenvalues = Vec(4);
    b.eigenvalues << cplx(0, 0), cplx(1, 0), cplx(2, 0), cplx(0.5, 1);

    auto h = spectra::dos_hist({a, b}, spectra::DosAxis::ImagPart, 2);
    REQUIRE(h.samples == 2);
    REQUIRE(h.edges.size() == 3);
    REQUIRE(h.edges(0) == 0.0);
    REQUIRE(h.edges(2) == 1.0);
    // each realization carries unit mass before averaging
    REQUIRE(h.density(0) == Approx(1.25));
    REQUIRE(h.density(1) == Approx(0.75));
    REQUIRE(h.mass() == Approx(1.0).epsilon(1e-12));

    REQUIRE_THROWS_AS(spectra::dos_hist({}, spectra::DosAxis::ImagPart),
                      std::invalid_argument);
    spectra::SpectrumResult empty;
    REQUIRE_THROWS_AS(spectra::dos_hist({empty}, spectra::DosAxis::ImagPart),
                      std::invalid_argument);
}

TEST_CASE("density histogram over the complex plane") {
    std::vector<spectra::SpectrumResult> sps;
    for (int s = 1; s <= 3; ++s)
        sps.push_back(spectra::diagonalize(spectra::ginibre(spectra::Ginibre::GinUE, 48,
                                                            std::uint64_t(s)),
                                           false));
    auto h = spectra::dos_hist(sps, spectra::DosAxis::ComplexPlane2D, 8);
    REQUIRE(h.axis == spectra::DosAxis::ComplexPlane2D);
    REQUIRE(h.samples == 3);
    REQUIRE(h.density2d.rows() == 8);
    REQUIRE(h.density2d.cols() == 8);
    REQUIRE(h.density2d.minCoeff() >= 0.0);
    REQUIRE(h.mass() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("Ginibre ensembles have the right structure") {
    SECTION("deterministic in the seed") {
        auto h1 = spectra::ginibre(spectra::Ginibre::GinUE, 16, 5);
        auto h2 = spectra::ginibre(spectra::Ginibre::GinUE, 16, 5);
        REQUIRE(h1 == h2);
        auto h3 = spectra::ginibre(spectra::Ginibre::GinUE, 16, 6);
        REQUIRE(h1 != h3);
    }
    SECTION("entry normalization") {
        auto h = spectra::ginibre(spectra::Ginibre::GinUE, 64, 12);
        REQUIRE(h.squaredNorm() / double(64 * 64) == Approx(1.0).epsilon(0.1));
        auto r = spectra::ginibre(spectra::Ginibre::GinOE, 64, 12);
        REQUIRE(r.imag().norm() == 0.0);
        REQUIRE(r.squaredNorm() / double(64 * 64) == Approx(1.0).epsilon(0.1));
    }
    SECTION("quaternionic block form") {
        const Eigen::Index n = 12;
        auto h = spectra::ginibre(spectra::Ginibre::GinSE, n, 8);
        REQUIRE(h.rows() == 2 * n);
        REQUIRE(h.bottomRightCorner(n, n) == h.topLeftCorner(n, n).conjugate());
        REQUIRE(h.bottomLeftCorner(n, n) == -h.topRightCorner(n, n).conjugate());
    }
    REQUIRE_THROWS_AS(spectra::ginibre(spectra::Ginibre::GinUE, 0, 1), std::invalid_argument);
}

TEST_CASE("real eigenvalues appear only without time-reversal-like structure") {
    SECTION("real entries: O(sqrt(N)) exactly real eigenvalues") {
        const Eigen::Index n = 64;
        double cnt = 0;
        for (int s = 1; s <= 100; ++s) {
            auto sp = spectra::diagonalize(
                spectra::ginibre(spectra::Ginibre::GinOE, n, std::uint64_t(s)), false);
            REQUIRE(spectra::count_real(sp.eigenvalues, 1e-9) >= 1);
            cnt += double(spectra::count_real(sp.eigenvalues, 1e-9));
        }
        REQUIRE(cnt / 100 == Approx(std::sqrt(2.0 * double(n) / M_PI)).epsilon(0.15));
    }
    SECTION("quaternionic entries: conjugate pairs, none real") {
        for (int s = 1; s <= 5; ++s) {
            auto sp = spectra::diagonalize(
                spectra::ginibre(spectra::Ginibre::GinSE, 32, std::uint64_t(s)), false);
            REQUIRE(spectra::count_real(sp.eigenvalues, 1e-12) == 0);
            auto ev = sorted_complex(sp.eigenvalues);
            for (size_t i = 0; i + 1 < ev.size(); i += 2)
                REQUIRE(std::abs(ev[i] - std::conj(ev[i + 1])) < 1e-10);
        }
    }
    SECTION("complex entries fill a disk of radius sqrt(N)") {
        const Eigen::Index n = 64;
        double m2 = 0, rad = 0;
        for (int s = 1; s <= 20; ++s) {
            auto sp = spectra::diagonalize(
                spectra::ginibre(spectra::Ginibre::GinUE, n, std::uint64_t(s)), false);
            double acc = 0, r = 0;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += std::norm(sp.eigenvalues(i));
                r = std::max(r, std::abs(sp.eigenvalues(i)));
            }
            m2 += acc / double(n * n);
            rad += r / std::sqrt(double(n));
        }
        REQUIRE(m2 / 20 == Approx(0.5).margin(0.05));
        REQUIRE(rad / 20 > 0.95);
        REQUIRE(rad / 20 < 1.2);
    }
}

TEST_CASE("small-splitting exponent estimator") {
    auto st = rng::Stream::keyed(42, rng::Tag::Synthetic, 3);
    std::vector<double> s(100000);
    for (auto& x : s) x = std::pow(st.next_unit(), 1.0 / 3.0);  // P(s) ~ s^2 on [0, 1]
    std::sort(s.begin(), s.end());
    REQUIRE(spectra::detail::small_s_exponent(s) == Approx(2.0).margin(0.2));

    for (auto& x : s) x = x * x * x;  // back to uniform: P(s) ~ s^0
    std::sort(s.begin(), s.end());
    REQUIRE(spectra::detail::small_s_exponent(s) == Approx(0.0).margin(0.1));
}

TEST_CASE("doublet splittings under a weak imaginary potential") {
    spectra::SplittingConfig cfg;
    cfg.l = 6;
    cfg.samples = 40;
    cfg.eta = 1e-3;
    cfg.w_base = 3.0;
    cfg.seed = 3;
    auto st = spectra::splitting_stats(cfg);

    REQUIRE(st.total == 40 * 2 * 6 * 6);
    REQUIRE(st.s.size() >= 1000);
    REQUIRE(2 * long(st.s.size()) + st.discarded == st.total);
    REQUIRE(std::is_sorted(st.s.begin(), st.s.end()));
    REQUIRE(st.s.front() >= 0.0);
    // first-order splittings cannot exceed the perturbation scale
    REQUIRE(st.s.back() < cfg.eta);
    REQUIRE(st.hist.mass() == Approx(1.0).epsilon(1e-12));
    // strong low-s suppression from the symplectic doublet structure
    REQUIRE(st.beta_hat > 1.2);
    REQUIRE(st.beta_hat < 2.6);

    spectra::SplittingConfig bad = cfg;
    bad.samples = 0;
    REQUIRE_THROWS_AS(spectra::splitting_stats(bad), std::invalid_argument);
    bad = cfg;
    bad.eta = -1;
    REQUIRE_THROWS_AS(spectra::splitting_stats(bad), std::invalid_argument);
    bad = cfg;
    bad.l = 4;
    bad.samples = 1;  // far too few doublets for statistics
    REQUIRE_THROWS_AS(spectra::splitting_stats(bad), std::runtime_error);
}

TEST_CASE("participation overlay and CSV output") {
    auto h = spectra::ginibre(spectra::Ginibre::GinUE, 24, 4);
    auto sp = spectra::diagonalize(h, true);
    auto rows = spectra::ipr_overlay({sp, sp});
    REQUIRE(rows.size() == 48);
    REQUIRE(rows[0].re == sp.eigenvalues(0).real());
    REQUIRE(rows[0].inv_ipr == 1.0 / (*sp.ipr_vals)(0));

    auto bare = spectra::diagonalize(h, false);
    REQUIRE_THROWS_AS(spectra::ipr_overlay({bare}), std::invalid_argument);

    namespace fs = std::filesystem;
    auto dir = fs::temp_directory_path();
    auto f1 = (dir / "andloc_spec_test.csv").string();
    auto f2 = (dir / "andloc_dos_test.csv").string();
    auto f3 = (dir / "andloc_overlay_test.csv").string();
    spectra::write_spectrum_csv(f1, sp);
    spectra::write_dos_csv(f2, spectra::dos_hist({sp}, spectra::DosAxis::ImagPart, 4));
    spectra::write_overlay_csv(f3, rows);

    auto first_line = [](const std::string& p) {
        std::ifstream f(p);
        std::string line;
        std::getline(f, line);
        return line;
    };
    auto count_lines = [](const std::string& p) {
        std::ifstream f(p);
        std::string line;
        long n = 0;
        while (std::getline(f, line)) ++n;
        return n;
    };
    REQUIRE(first_line(f1) == "re,im,ipr");
    REQUIRE(count_lines(f1) == 25);
    REQUIRE(first_line(f2) == "bin_lo,bin_hi,density");
    REQUIRE(count_lines(f2) == 5);
    REQUIRE(first_line(f3) == "re,im,inv_ipr");
    REQUIRE(count_lines(f3) == 49);
    fs::remove(f1);
    fs::remove(f2);
    fs::remove(f3);
}
