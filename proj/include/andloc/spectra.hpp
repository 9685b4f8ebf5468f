#pragma once

// Desk-scale spectral analysis: dense diagonalization, eigenvalue clouds,
// density-of-states histograms, inverse participation ratios, Ginibre
// ensembles and the level-splitting statistics of weakly non-Hermitian
// Kramers doublets.

#include "common.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace andloc::spectra {

struct SpectrumResult {
    Vec eigenvalues;
    std::optional<Mat> vectors;  // right eigenvectors, unit 2-norm columns
    std::optional<RVec> ipr_vals;
    std::string source;
    double max_residual = 0;  // filled when vectors were requested
};

inline double ipr(const Vec& psi) {
    double s2 = 0, s4 = 0;
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
        double a2 = std::norm(psi(i));
        s2 += a2;
        s4 += a2 * a2;
    }
    if (s2 <= 0) throw std::invalid_argument("ipr of a zero vector");
    return s4 / (s2 * s2);
}

inline SpectrumResult diagonalize(const Mat& h, bool want_vectors, Eigen::Index cap = 8192) {
    if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize needs a square matrix");
    if (h.rows() > cap)
        throw std::invalid_argument("matrix dimension " + std::to_string(h.rows()) +
                                    " exceeds the dense cap " + std::to_string(cap));
    SpectrumResult res;
    if (want_vectors) {
        linalg::Eig e = linalg::eig(h);
        res.max_residual = linalg::eig_residual(h, e);
        RVec iv(e.values.size());
        for (Eigen::Index k = 0; k < e.values.size(); ++k) iv(k) = ipr(e.vectors.col(k));
        res.eigenvalues = std::move(e.values);
        res.ipr_vals = std::move(iv);
        res.vectors = std::move(e.vectors);
    } else {
        res.eigenvalues = linalg::eig(h, false).values;
    }
    return res;
}

// Eigenvalues with |Im E| below rel_tol times the spectral radius count as real.
inline Eigen::Index count_real(const Vec& eigenvalues, double rel_tol = 1e-10) {
    double radius = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        radius = std::max(radius, std::abs(eigenvalues(i)));
    Eigen::Index n = 0;
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        if (std::abs(eigenvalues(i).imag()) < rel_tol * radius) ++n;
    return n;
}

// ---- histograms ---------------------------------------------------------------

enum class DosAxis { ImagPart, ComplexPlane2D };

struct DosHistogram {
    DosAxis axis = DosAxis::ImagPart;
    RVec edges;                // 1D: n_bins + 1
    RVec density;              // 1D: n_bins; integrates to 1
    RVec edges_re, edges_im;   // 2D
    RMat density2d;            // 2D: re-bin rows, im-bin cols; integrates to 1
    int samples = 0;

    double mass() const {
        if (axis == DosAxis::ImagPart) {
            double m = 0;
            for (Eigen::Index i = 0; i < density.size(); ++i)
                m += density(i) * (edges(i + 1) - edges(i));
            return m;
        }
        double m = 0;
        for (Eigen::Index i = 0; i < density2d.rows(); ++i)
            for (Eigen::Index j = 0; j < density2d.cols(); ++j)
                m += density2d(i, j) * (edges_re(i + 1) - edges_re(i)) *
                     (edges_im(j + 1) - edges_im(j));
        return m;
    }
};

namespace detail {

// Freedman-Diaconis bin count with fallbacks for degenerate data.
inline int fd_bins(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    double range = v.back() - v.front();
    if (!(range > 0)) return 1;
    double q1 = v[n / 4], q3 = v[(3 * n) / 4];
    double width = 2.0 * (q3 - q1) / std::cbrt(double(n));
    if (!(width > 0)) return int(std::min<size_t>(64, std::max<size_t>(1, n / 16)));
    int bins = int(std::ceil(range / width));
    return std::max(1, std::min(bins, 100000));
}

inline RVec edges_for(const std::vector<double>& v, int bins) {
    double lo = *std::min_element(v.begin(), v.end());
    double hi = *std::max_element(v.begin(), v.end());
    if (!(hi > lo)) {
        double pad = std::max(0.5, std::abs(lo) * 1e-6);
        lo -= pad;
        hi += pad;
    }
    RVec e(bins + 1);
    for (int i = 0; i <= bins; ++i) e(i) = lo + (hi - lo) * double(i) / bins;
    return e;
}

inline Eigen::Index bin_of(double x, const RVec& edges) {
    const Eigen::Index n = edges.size() - 1;
    if (x <= edges(0)) return 0;
    if (x >= edges(n)) return n - 1;
    Eigen::Index i = Eigen::Index((x - edges(0)) / (edges(n) - edges(0)) * double(n));
    i = std::min(std::max<Eigen::Index>(i, 0), n - 1);
    while (i > 0 && x < edges(i)) --i;
    while (i < n - 1 && x >= edges(i + 1)) ++i;
    return i;
}

// Averaged normalized histogram: each sample carries total mass 1.
inline DosHistogram hist1d(const std::vector<std::vector<double>>& samples, int bins) {
    std::vector<double> pooled;
    for (const auto& s : samples) pooled.insert(pooled.end(), s.begin(), s.end());
    if (pooled.empty()) throw std::invalid_argument("histogram of empty data");
    if (bins <= 0) bins = fd_bins(pooled);
    DosHistogram h;
    h.axis = DosAxis::ImagPart;
    h.edges = edges_for(pooled, bins);
    h.density = RVec::Zero(bins);
    int used = 0;
    for (const auto& s : samples) {
        if (s.empty()) continue;
        ++used;
        double w = 1.0 / double(s.size());
        for (double x : s) h.density(bin_of(x, h.edges)) += w;
    }
    if (used == 0) throw std::invalid_argument("histogram of empty data");
    for (Eigen::Index i = 0; i < bins; ++i)
        h.density(i) /= double(used) * (h.edges(i + 1) - h.edges(i));
    h.samples = used;
    return h;
}

}  // namespace detail

inline DosHistogram dos_hist(const std::vector<SpectrumResult>& spectra, DosAxis axis,
                             int bins = 0) {
    if (spectra.empty()) throw std::invalid_argument("dos_hist needs at least one spectrum");
    if (axis == DosAxis::ImagPart) {
        std::vector<std::vector<double>> samples;
        for (const auto& s : spectra) {
            std::vector<double> im;
            for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
                im.push_back(s.eigenvalues(i).imag());
            samples.push_back(std::move(im));
        }
        return detail::hist1d(samples, bins);
    }
    std::vector<double> re, im;
    for (const auto& s : spectra)
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
            re.push_back(s.eigenvalues(i).real());
            im.push_back(s.eigenvalues(i).imag());
        }
    if (re.empty()) throw std::invalid_argument("dos_hist needs at least one eigenvalue");
    int bre = bins > 0 ? bins : detail::fd_bins(re);
    int bim = bins > 0 ? bins : detail::fd_bins(im);
    DosHistogram h;
    h.axis = DosAxis::ComplexPlane2D;
    h.edges_re = detail::edges_for(re, bre);
    h.edges_im = detail::edges_for(im, bim);
    h.density2d = RMat::Zero(bre, bim);
    int used = 0;
    for (const auto& s : spectra) {
        if (s.eigenvalues.size() == 0) continue;
        ++used;
        double w = 1.0 / double(s.eigenvalues.size());
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
            h.density2d(detail::bin_of(s.eigenvalues(i).real(), h.edges_re),
                        detail::bin_of(s.eigenvalues(i).imag(), h.edges_im)) += w;
    }
    for (Eigen::Index i = 0; i < bre; ++i)
        for (Eigen::Index j = 0; j < bim; ++j)
            h.density2d(i, j) /= double(used) * (h.edges_re(i + 1) - h.edges_re(i)) *
                                 (h.edges_im(j + 1) - h.edges_im(j));
    h.samples = used;
    return h;
}

// ---- Ginibre ensembles ---------------------------------------------------------

enum class Ginibre { GinUE, GinOE, GinSE };

// Entrywise unit variance throughout: complex entries have Re, Im ~ N(0, 1/2),
// real entries N(0, 1). GinSE returns the 2N x 2N block form [[X, Y], [-Y*, X*]],
// which obeys sigma_y H* sigma_y = H exactly (blockwise).
inline Mat ginibre(Ginibre ens, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("ginibre needs N >= 1");
    auto st = rng::Stream::keyed(seed, rng::Tag::Ginibre, static_cast<std::uint64_t>(ens),
                                 static_cast<std::uint64_t>(n));
    const double rt2 = std::sqrt(0.5);
    switch (ens) {
        case Ginibre::GinUE: {
            Mat h(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    h(i, j) = cplx(st.normal() * rt2, st.normal() * rt2);
            return h;
        }
        case Ginibre::GinOE: {
            Mat h(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i) h(i, j) = st.normal();
            return h;
        }
        case Ginibre::GinSE: {
            Mat x(n, n), y(n, n);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    x(i, j) = cplx(st.normal() * rt2, st.normal() * rt2);
            for (Eigen::Index j = 0; j < n; ++j)
                for (Eigen::Index i = 0; i < n; ++i)
                    y(i, j) = cplx(st.normal() * rt2, st.normal() * rt2);
            Mat h(2 * n, 2 * n);
            h.topLeftCorner(n, n) = x;
            h.topRightCorner(n, n) = y;
            h.bottomLeftCorner(n, n) = -y.conjugate();
            h.bottomRightCorner(n, n) = x.conjugate();
            return h;
        }
    }
    throw std::logic_error("unreachable");
}

// ---- Kramers-splitting statistics --------------------------------------------

struct SplittingConfig {
    Eigen::Index l = 8;    // closed periodic 2D lattice, dimension 2 L^2
    double w_base = 3.0;   // disorder of the Hermitian symplectic base model
    double eta = 1e-3;     // imaginary on-site strength; keep well below the
                           // mean level spacing so doublets stay identifiable
    int samples = 200;
    std::uint64_t seed = 1;
    int bins = 0;
    Eigen::Index cap = 8192;
};

struct SplittingStats {
    std::vector<double> s;  // per-doublet |Im E|, ascending
    DosHistogram hist;
    double beta_hat = 0;  // small-s exponent of P(s)
    long discarded = 0;   // levels that failed the pairing test
    long total = 0;       // levels examined
};

namespace detail {

// Lower-tail exponent of P(s) ~ s^beta from the lowest 5% of the sample.
// With F(s) ~ s^(beta+1) near zero, the ratios (s_i / s_(k))^(beta+1) are
// uniform conditional on s < s_(k), so the maximum-likelihood estimate is
// alpha = k / sum_i ln(s_(k)/s_i), the lower-tail Hill estimator.
inline double small_s_exponent(const std::vector<double>& sorted_s) {
    const size_t n = sorted_s.size();
    size_t k = std::max<size_t>(100, n / 20);
    k = std::min(k, n - 1);
    const double t = sorted_s[k];
    if (!(t > 0)) throw std::runtime_error("splitting sample is all zeros");
    double acc = 0;
    size_t m = 0;
    for (size_t i = 0; i < k; ++i) {
        if (!(sorted_s[i] > 0)) continue;
        acc += std::log(t / sorted_s[i]);
        ++m;
    }
    if (m < 10) throw std::runtime_error("too few nonzero splittings for an exponent fit");
    return double(m) / acc - 1.0;
}

}  // namespace detail

inline SplittingStats splitting_stats(const SplittingConfig& cfg) {
    if (cfg.samples < 1) throw std::invalid_argument("splitting_stats needs samples >= 1");
    if (!(cfg.eta >= 0)) throw std::invalid_argument("perturbation strength must be >= 0");
    SplittingStats out;
    for (int smp = 0; smp < cfg.samples; ++smp) {
        model::LatticeSpec lat{2, cfg.l, cfg.l, true, model::Role::ClosedPeriodic};
        model::DisorderSpec dis;
        dis.w_r = cfg.w_base;
        dis.w_i = 0;
        auto st = rng::Stream::keyed(cfg.seed, rng::Tag::Splitting, std::uint64_t(smp));
        auto m = model::build_su2(lat, dis, model::ClassTag::of("AII"), st.next_u64());
        Mat h0 = m.assemble_full(cfg.cap);
        const Eigen::Index dim = h0.rows();

        linalg::EigH base = linalg::eig_hermitian(h0);
        const Eigen::Index nd = dim / 2;
        RVec centers(nd), halfgap(nd);
        for (Eigen::Index k = 0; k < nd; ++k)
            centers(k) = 0.5 * (base.values(2 * k) + base.values(2 * k + 1));
        for (Eigen::Index k = 0; k < nd; ++k) {
            double lo = k > 0 ? centers(k) - centers(k - 1)
                              : std::numeric_limits<double>::infinity();
            double hi = k + 1 < nd ? centers(k + 1) - centers(k)
                                   : std::numeric_limits<double>::infinity();
            halfgap(k) = 0.5 * std::min(lo, hi);
        }

        Mat h = h0;
        for (Eigen::Index site = 0; site < dim / 2; ++site) {
            double w = st.uniform(-0.5, 0.5);
            h(2 * site, 2 * site) += cplx(0, cfg.eta * w);
            h(2 * site + 1, 2 * site + 1) += cplx(0, -cfg.eta * w);
        }
        Vec ev = linalg::eig(h, false).values;

        std::vector<std::vector<double>> claim(static_cast<size_t>(nd));
        for (Eigen::Index i = 0; i < dim; ++i) {
            ++out.total;
            // centers are sorted: nearest by binary search on the real part
            double re = ev(i).real();
            Eigen::Index k = std::lower_bound(centers.data(), centers.data() + nd, re) -
                             centers.data();
            Eigen::Index best = -1;
            double bestd = std::numeric_limits<double>::infinity();
            for (Eigen::Index c : {k - 1, k, k + 1}) {
                if (c < 0 || c >= nd) continue;
                double d = std::abs(ev(i) - cplx(centers(c), 0));
                if (d < bestd) {
                    bestd = d;
                    best = c;
                }
            }
            if (best < 0 || bestd > halfgap(best)) {
                ++out.discarded;
                continue;
            }
            claim[size_t(best)].push_back(std::abs(ev(i).imag()));
        }
        for (auto& c : claim) {
            if (c.size() != 2) {
                out.discarded += long(c.size());
                continue;
            }
            out.s.push_back(0.5 * (c[0] + c[1]));
        }
    }
    if (out.s.size() < 1000)
        throw std::runtime_error("splitting statistics too small: " +
                                 std::to_string(out.s.size()) +
                                 " splittings collected, need at least 1000");
    std::sort(out.s.begin(), out.s.end());
    out.hist = detail::hist1d({out.s}, cfg.bins);
    out.beta_hat = detail::small_s_exponent(out.s);
    return out;
}

// ---- overlays and CSV ----------------------------------------------------------

struct OverlayRow {
    double re = 0, im = 0, inv_ipr = 0;
};

inline std::vector<OverlayRow> ipr_overlay(const std::vector<SpectrumResult>& spectra) {
    std::vector<OverlayRow> rows;
    for (const auto& s : spectra) {
        if (!s.ipr_vals)
            throw std::invalid_argument("ipr_overlay needs spectra with eigenvectors");
        for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i)
            rows.push_back({s.eigenvalues(i).real(), s.eigenvalues(i).imag(),
                            1.0 / (*s.ipr_vals)(i)});
    }
    return rows;
}

inline void write_spectrum_csv(const std::string& path, const SpectrumResult& s) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "re,im,ipr\n";
    for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
        f << fmt_double(s.eigenvalues(i).real()) << "," << fmt_double(s.eigenvalues(i).imag())
          << ",";
        if (s.ipr_vals) f << fmt_double((*s.ipr_vals)(i));
        f << "\n";
    }
}

inline void write_dos_csv(const std::string& path, const DosHistogram& h) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    if (h.axis == DosAxis::ImagPart) {
        f << "bin_lo,bin_hi,density\n";
        for (Eigen::Index i = 0; i < h.density.size(); ++i)
            f << fmt_double(h.edges(i)) << "," << fmt_double(h.edges(i + 1)) << ","
              << fmt_double(h.density(i)) << "\n";
    } else {
        f << "re_lo,re_hi,im_lo,im_hi,density\n";
        for (Eigen::Index i = 0; i < h.density2d.rows(); ++i)
            for (Eigen::Index j = 0; j < h.density2d.cols(); ++j)
                f << fmt_double(h.edges_re(i)) << "," << fmt_double(h.edges_re(i + 1)) << ","
                  << fmt_double(h.edges_im(j)) << "," << fmt_double(h.edges_im(j + 1)) << ","
                  << fmt_double(h.density2d(i, j)) << "\n";
    }
}

inline void write_overlay_csv(const std::string& path, const std::vector<OverlayRow>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    f << "re,im,inv_ipr\n";
    for (const auto& r : rows)
        f << fmt_double(r.re) << "," << fmt_double(r.im) << "," << fmt_double(r.inv_ipr) << "\n";
}

}  // namespace andloc::spectra
