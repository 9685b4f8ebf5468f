#pragma once

// Quasi-1D transfer-matrix Lyapunov spectra.
//
// The wave equation of a strip Hamiltonian at energy E,
//   F_{n-1} psi_{n-1} + H_n psi_n + G_n psi_{n+1} = E psi_n,
// is iterated as psi_{n+1} = G_n^{-1}[(E - H_n) psi_n - F_{n-1} psi_{n-1}].
// The state is a full 2B-column frame (B = slice dimension) re-orthogonalized
// by thin QR every qr_interval slices; the accumulated log magnitudes of the
// R diagonal divided by the slice count converge to the 2B Lyapunov
// exponents. The smallest exponent that is positive beyond three standard
// errors gives the localization length xi = 1/gamma_min and Lambda = xi/L.
//
// Standard errors come from partitioning the run into contiguous blocks and
// taking the variance of per-block exponent estimates. The run stops early
// once se/gamma on the minimal exponent drops below target_rel_error.

#include "common.hpp"
#include "linalg.hpp"
#include "model.hpp"
#include "rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace andloc::transfer {

struct TransferConfig {
    cplx energy{0, 0};
    Eigen::Index qr_interval = 8;
    double target_rel_error = 1e-3;
    Eigen::Index max_slices = 100000;
    int block_count = 16;

    void validate() const {
        if (qr_interval < 1) throw std::invalid_argument("qr_interval must be >= 1");
        if (!(target_rel_error > 0 && target_rel_error < 1))
            throw std::invalid_argument("target_rel_error must lie in (0, 1)");
        if (max_slices < 1) throw std::invalid_argument("max_slices must be >= 1");
        if (block_count < 8) throw std::invalid_argument("block_count must be >= 8");
    }
};

struct LyapunovResult {
    double gamma_min = 0;
    double se_gamma = 0;
    double xi = 0;
    double lambda = 0;
    Eigen::Index slices_used = 0;
    bool converged = false;
    std::string diagnostic;
    RVec spectrum;     // all 2B exponents, descending
    RVec spectrum_se;  // matching standard errors
};

// One propagation step needs the slice Hamiltonian H_n, the forward hopping
// G_n (coupling to slice n+1) and the backward hopping F_{n-1} (from slice
// n-1). scale_g/scale_f carry optional unit-modulus gauge factors.
struct StepOps {
    model::SliceOps h;
    model::LinkOps g_link;  // g half used
    model::LinkOps f_link;  // f half used
    cplx scale_g{1, 0};
    cplx scale_f{1, 0};
};

class SliceSource {
  public:
    virtual ~SliceSource() = default;
    virtual Eigen::Index dim() const = 0;         // B
    virtual Eigen::Index transverse() const = 0;  // L entering Lambda = xi/L
    virtual void step(Eigen::Index n, StepOps& out) const = 0;  // n >= 1
};

class ModelSource : public SliceSource {
  public:
    explicit ModelSource(model::ModelInstance m) : m_(std::move(m)) {
        if (m_.lattice.role != model::Role::Transfer)
            throw std::invalid_argument("transfer needs a model in transfer geometry");
    }
    Eigen::Index dim() const override { return m_.slice_dim(); }
    Eigen::Index transverse() const override { return m_.lattice.l; }
    void step(Eigen::Index n, StepOps& out) const override {
        out.h = m_.slice_ops(n);
        out.g_link = m_.link_ops(n);
        out.f_link = m_.link_ops(n - 1);
        out.scale_g = out.scale_f = cplx(1, 0);
    }
    const model::ModelInstance& instance() const { return m_; }

  private:
    model::ModelInstance m_;
};

// Uniform chain with unit hoppings and constant on-site energy; dim 1 gives
// the textbook 1D chain.
class CleanChainSource : public SliceSource {
  public:
    explicit CleanChainSource(Eigen::Index b = 1, cplx onsite = {0, 0})
        : b_(b), onsite_(onsite) {}
    Eigen::Index dim() const override { return b_; }
    Eigen::Index transverse() const override { return b_; }
    void step(Eigen::Index, StepOps& out) const override {
        out.h.diag = Vec::Constant(b_, onsite_);
        out.h.row.clear();
        out.h.col.clear();
        out.h.val.clear();
        out.g_link.form = model::HopForm::DiagPM1;
        out.g_link.sgn_g.assign(size_t(b_), 1.0);
        out.f_link.form = model::HopForm::DiagPM1;
        out.f_link.sgn_f.assign(size_t(b_), 1.0);
        out.scale_g = out.scale_f = cplx(1, 0);
    }

  private:
    Eigen::Index b_;
    cplx onsite_;
};

// Attaches a fixed unit-modulus gauge phase to every link: e^{+i theta} on the
// forward hopping and e^{-i theta} on the backward one, i.e. the phase pattern
// of the lattice gauge transformation psi_n -> e^{i n theta} psi_n. The
// Lyapunov spectrum must not notice. (Scaling both directions by the SAME
// scalar is not a gauge move; it rotates the band and shifts the exponents.)
class PhaseScaledSource : public SliceSource {
  public:
    PhaseScaledSource(const SliceSource& base, cplx phase) : base_(base), phase_(phase) {}
    Eigen::Index dim() const override { return base_.dim(); }
    Eigen::Index transverse() const override { return base_.transverse(); }
    void step(Eigen::Index n, StepOps& out) const override {
        base_.step(n, out);
        out.scale_g *= phase_;
        out.scale_f *= std::conj(phase_);
    }

  private:
    const SliceSource& base_;
    cplx phase_;
};

namespace detail {

struct DenseStep {
    Mat h, g, f;
};

inline DenseStep densify(const StepOps& s, Eigen::Index b) {
    DenseStep d;
    d.h = Mat::Zero(b, b);
    d.h.diagonal() = s.h.diag;
    for (size_t k = 0; k < s.h.val.size(); ++k) d.h(s.h.row[k], s.h.col[k]) += s.h.val[k];
    d.g = Mat::Zero(b, b);
    d.f = Mat::Zero(b, b);
    if (s.g_link.form == model::HopForm::DiagPM1) {
        for (Eigen::Index t = 0; t < b; ++t) d.g(t, t) = s.scale_g * s.g_link.sgn_g[size_t(t)];
    } else {
        for (size_t t = 0; t < s.g_link.blk_g.size(); ++t)
            d.g.block(2 * Eigen::Index(t), 2 * Eigen::Index(t), 2, 2) =
                s.scale_g * s.g_link.blk_g[t];
    }
    if (s.f_link.form == model::HopForm::DiagPM1) {
        for (Eigen::Index t = 0; t < b; ++t) d.f(t, t) = s.scale_f * s.f_link.sgn_f[size_t(t)];
    } else {
        for (size_t t = 0; t < s.f_link.blk_f.size(); ++t)
            d.f.block(2 * Eigen::Index(t), 2 * Eigen::Index(t), 2, 2) =
                s.scale_f * s.f_link.blk_f[t];
    }
    return d;
}

// In-place application of one slice to the frame (u over v), writing the new
// top block into w. Returns the largest |Re|,|Im| seen in w.
inline double apply_step(const StepOps& s, cplx e, const Mat& u, const Mat& v, Mat& w) {
    const Eigen::Index b = u.rows(), cols = u.cols();
    const cplx* dg = s.h.diag.data();
    const int* br = s.h.row.data();
    const int* bc = s.h.col.data();
    const cplx* bv = s.h.val.data();
    const size_t nb = s.h.val.size();
    const bool diag_form = s.g_link.form == model::HopForm::DiagPM1;
    const cplx inv_g = cplx(1, 0) / s.scale_g;
    const cplx fph = s.scale_f;
    double mx = 0;
    for (Eigen::Index j = 0; j < cols; ++j) {
        const cplx* uj = u.col(j).data();
        const cplx* vj = v.col(j).data();
        cplx* wj = w.col(j).data();
        for (Eigen::Index r = 0; r < b; ++r) wj[r] = (e - dg[r]) * uj[r];
        for (size_t k = 0; k < nb; ++k) wj[br[k]] -= bv[k] * uj[bc[k]];
        if (diag_form) {
            const double* fs = s.f_link.sgn_f.data();
            const double* gs = s.g_link.sgn_g.data();
            for (Eigen::Index r = 0; r < b; ++r) {
                cplx t = wj[r] - fph * fs[r] * vj[r];
                t *= gs[r] * inv_g;
                wj[r] = t;
                mx = std::max(mx, std::max(std::abs(t.real()), std::abs(t.imag())));
            }
        } else {
            const Eigen::Matrix2cd* fb = s.f_link.blk_f.data();
            const Eigen::Matrix2cd* gb = s.g_link.blk_g.data();
            for (Eigen::Index t = 0; t * 2 < b; ++t) {
                const cplx* f = fb[t].data();  // column-major 2x2
                const cplx* g = gb[t].data();
                cplx w0 = wj[2 * t] - fph * (f[0] * vj[2 * t] + f[2] * vj[2 * t + 1]);
                cplx w1 = wj[2 * t + 1] - fph * (f[1] * vj[2 * t] + f[3] * vj[2 * t + 1]);
                cplx a = (std::conj(g[0]) * w0 + std::conj(g[1]) * w1) * inv_g;
                cplx c = (std::conj(g[2]) * w0 + std::conj(g[3]) * w1) * inv_g;
                wj[2 * t] = a;
                wj[2 * t + 1] = c;
                mx = std::max(mx, std::max(std::abs(a.real()), std::abs(a.imag())));
                mx = std::max(mx, std::max(std::abs(c.real()), std::abs(c.imag())));
            }
        }
    }
    return mx;
}

inline double sample_se(const std::vector<double>& xs) {
    const size_t n = xs.size();
    if (n < 2) return std::numeric_limits<double>::infinity();
    double mean = 0;
    for (double x : xs) mean += x;
    mean /= double(n);
    double var = 0;
    for (double x : xs) var += (x - mean) * (x - mean);
    var /= double(n - 1);
    return std::sqrt(var / double(n));
}

}  // namespace detail

// Dense transfer matrix of slice n, mapping (psi_n, psi_{n-1}) to
// (psi_{n+1}, psi_n).
inline Mat slice_transfer(const SliceSource& src, Eigen::Index n, cplx e) {
    const Eigen::Index b = src.dim();
    StepOps s;
    src.step(n, s);
    detail::DenseStep d = detail::densify(s, b);
    Mat ginv;
    if (s.g_link.form == model::HopForm::DiagPM1) {
        ginv = Mat::Zero(b, b);
        for (Eigen::Index t = 0; t < b; ++t) ginv(t, t) = cplx(1, 0) / d.g(t, t);
    } else {
        ginv = Mat::Zero(b, b);
        cplx inv = cplx(1, 0) / s.scale_g;
        for (size_t t = 0; t < s.g_link.blk_g.size(); ++t)
            ginv.block(2 * Eigen::Index(t), 2 * Eigen::Index(t), 2, 2) =
                inv * s.g_link.blk_g[t].adjoint();
    }
    Mat t(2 * b, 2 * b);
    t.topLeftCorner(b, b) = ginv * (e * Mat::Identity(b, b) - d.h);
    t.topRightCorner(b, b) = -ginv * d.f;
    t.bottomLeftCorner(b, b) = Mat::Identity(b, b);
    t.bottomRightCorner(b, b) = Mat::Zero(b, b);
    return t;
}

inline Mat slice_transfer(const model::ModelInstance& m, Eigen::Index n, cplx e) {
    ModelSource src(m);
    return slice_transfer(src, n, e);
}

inline LyapunovResult propagate(const SliceSource& src, const TransferConfig& cfg) {
    cfg.validate();
    const Eigen::Index b = src.dim();
    const Eigen::Index nexp = 2 * b;
    const Eigen::Index qr = cfg.qr_interval;
    Eigen::Index block_len = cfg.max_slices / (Eigen::Index(cfg.block_count) * 8);
    block_len = std::max<Eigen::Index>(qr, (block_len / qr) * qr);

    Mat u = Mat::Zero(b, nexp), v = Mat::Zero(b, nexp), w = Mat::Zero(b, nexp);
    u.topLeftCorner(b, b) = Mat::Identity(b, b);
    v.bottomRightCorner(b, b).setZero();
    v.block(0, b, b, b) = Mat::Identity(b, b);
    Mat frame(nexp, nexp);

    RVec accum = RVec::Zero(nexp);
    std::vector<std::vector<double>> block_sums;  // per block, per exponent
    std::vector<Eigen::Index> block_lens;         // slices per block
    RVec cur_block = RVec::Zero(nexp);
    Eigen::Index cur_block_slices = 0;
    double pending_log = 0;
    Eigen::Index slices = 0;
    StepOps ops;
    LyapunovResult res;

    auto do_qr = [&]() {
        frame.topRows(b) = u;
        frame.bottomRows(b) = v;
        RVec lnd = linalg::qr_lndiag(frame);
        for (Eigen::Index k = 0; k < nexp; ++k) {
            double inc = lnd(k) + pending_log;
            accum(k) += inc;
            cur_block(k) += inc;
        }
        pending_log = 0;
        u = frame.topRows(b);
        v = frame.bottomRows(b);
    };

    // Evaluates spectrum and the minimal positive exponent; returns true when
    // a margin-positive exponent exists.
    struct Pick {
        bool found = false;
        double gamma = 0, se = 0;
    };
    auto evaluate = [&](Pick& pick) {
        const double inv = 1.0 / double(slices);
        std::vector<Eigen::Index> idx(static_cast<size_t>(nexp));
        for (Eigen::Index k = 0; k < nexp; ++k) idx[size_t(k)] = k;
        std::sort(idx.begin(), idx.end(),
                  [&](Eigen::Index a, Eigen::Index c) { return accum(a) > accum(c); });
        res.spectrum = RVec(nexp);
        res.spectrum_se = RVec(nexp);
        const size_t nb = block_sums.size();
        std::vector<double> per_block;
        for (Eigen::Index r = 0; r < nexp; ++r) {
            Eigen::Index k = idx[size_t(r)];
            res.spectrum(r) = accum(k) * inv;
            per_block.clear();
            for (size_t bI = 0; bI < nb; ++bI)
                per_block.push_back(block_sums[bI][size_t(k)] / double(block_lens[bI]));
            res.spectrum_se(r) = nb >= 2 ? detail::sample_se(per_block) : 0.0;
        }
        pick = Pick{};
        for (Eigen::Index r = nexp - 1; r >= 0; --r) {
            double g = res.spectrum(r), se = res.spectrum_se(r);
            if (g - 3 * se > 0) {
                pick.found = true;
                pick.gamma = g;
                pick.se = se;
                break;
            }
        }
        return pick.found;
    };

    bool aborted = false;
    while (slices < cfg.max_slices) {
        src.step(slices + 1, ops);
        double mx = detail::apply_step(ops, cfg.energy, u, v, w);
        if (!std::isfinite(mx)) {
            res.diagnostic = "non-finite state during propagation";
            aborted = true;
            break;
        }
        v.swap(u);
        u.swap(w);
        if (mx > 1e100) {
            double s = mx;
            u /= s;
            v /= s;
            pending_log += std::log(s);
        }
        ++slices;
        ++cur_block_slices;
        if (slices % qr == 0) do_qr();
        if (cur_block_slices >= block_len && slices % qr == 0) {
            block_sums.push_back(
                std::vector<double>(cur_block.data(), cur_block.data() + nexp));
            block_lens.push_back(cur_block_slices);
            cur_block.setZero();
            cur_block_slices = 0;
            if (Eigen::Index(block_sums.size()) >= cfg.block_count) {
                Pick pick;
                if (evaluate(pick) && pick.se / pick.gamma <= cfg.target_rel_error) {
                    res.converged = true;
                    break;
                }
            }
        }
    }
    if (!aborted && slices % qr != 0) do_qr();  // flush the tail
    if (!aborted && cur_block_slices >= std::max<Eigen::Index>(1, block_len / 2)) {
        block_sums.push_back(std::vector<double>(cur_block.data(), cur_block.data() + nexp));
        block_lens.push_back(cur_block_slices);
    }

    res.slices_used = slices;
    Pick pick;
    bool found = !aborted && evaluate(pick);
    if (!found) {
        res.converged = false;
        if (res.diagnostic.empty())
            res.diagnostic =
                "no Lyapunov exponent is positive beyond 3 standard errors; the state "
                "looks ballistic or degenerate";
        res.gamma_min = 0;
        res.se_gamma = 0;
        res.xi = std::numeric_limits<double>::infinity();
        res.lambda = std::numeric_limits<double>::infinity();
        return res;
    }
    res.gamma_min = pick.gamma;
    res.se_gamma = pick.se;
    if (!res.converged && pick.se / pick.gamma <= cfg.target_rel_error) res.converged = true;
    res.xi = 1.0 / res.gamma_min;
    res.lambda = res.xi / double(src.transverse());
    return res;
}

inline LyapunovResult propagate(const model::ModelInstance& m, const TransferConfig& cfg) {
    ModelSource src(m);
    return propagate(src, cfg);
}

// ---- parameter scans -------------------------------------------------------

struct DataRow {
    double w = 0;
    Eigen::Index l = 0;
    double lambda = 0;
    double sigma_lambda = 0;
    Eigen::Index slices = 0;
    bool converged = false;
};

struct ScalingDataset {
    std::string klass;
    int d = 3;
    cplx energy{0, 0};
    std::vector<DataRow> rows;  // sorted by (l, w)
};

inline model::DisorderSpec disorder_for(const std::string& klass_raw, double w) {
    const std::string klass = symmetry::class_record(klass_raw).name;
    model::DisorderSpec ds;
    if (klass == "AI") {
        ds.w = w;
    } else if (klass == "AII" || klass == "AIIdag") {
        ds.w_r = w;
        ds.w_i = w;
    } else if (klass == "CIIdag" || klass == "DIII") {
        ds.w_r = 0;
        ds.w_i = w;
    } else {
        throw std::invalid_argument("no disorder convention for class " + klass);
    }
    return ds;
}

inline model::ModelInstance build_for_scan(const std::string& klass_raw, int d, Eigen::Index l,
                                           bool periodic, double w, Eigen::Index max_slices,
                                           std::uint64_t seed) {
    const std::string klass = symmetry::class_record(klass_raw).name;
    model::LatticeSpec lat;
    lat.d = d;
    lat.l = l;
    lat.lz = max_slices + 2;
    lat.transverse_periodic = periodic;
    lat.role = model::Role::Transfer;
    if (klass == "AI") return model::build_o1(lat, w, seed);
    return model::build_su2(lat, disorder_for(klass, w), model::ClassTag::of(klass), seed);
}

struct ScanConfig {
    std::string klass = "AI";
    int d = 3;
    bool transverse_periodic = true;
    std::vector<double> w_grid;
    std::vector<Eigen::Index> l_list;
    TransferConfig transfer;
    std::uint64_t master_seed = 1;
    int workers = 1;
    std::function<void(size_t, size_t)> progress;  // (done, total), may be empty
};

inline ScalingDataset lambda_scan(const ScanConfig& sc) {
    if (sc.w_grid.empty() || sc.l_list.empty())
        throw std::invalid_argument("lambda_scan needs nonempty W and L grids");
    sc.transfer.validate();
    ScalingDataset ds;
    ds.klass = symmetry::class_record(sc.klass).name;
    ds.d = sc.d;
    ds.energy = sc.transfer.energy;
    const size_t total = sc.w_grid.size() * sc.l_list.size();
    ds.rows.resize(total);
    std::atomic<size_t> next{0};
    std::atomic<size_t> done{0};
    std::mutex progress_mu;
    auto worker = [&]() {
        for (;;) {
            size_t task = next.fetch_add(1);
            if (task >= total) return;
            size_t li = task / sc.w_grid.size();
            size_t wi = task % sc.w_grid.size();
            double w = sc.w_grid[wi];
            Eigen::Index l = sc.l_list[li];
            std::uint64_t seed = rng::Stream::keyed(sc.master_seed, rng::Tag::ScanPoint,
                                                    std::uint64_t(wi), std::uint64_t(li))
                                     .next_u64();
            model::ModelInstance m = build_for_scan(ds.klass, sc.d, l, sc.transverse_periodic,
                                                    w, sc.transfer.max_slices, seed);
            LyapunovResult r = propagate(m, sc.transfer);
            DataRow row;
            row.w = w;
            row.l = l;
            row.lambda = r.lambda;
            row.sigma_lambda =
                std::isfinite(r.lambda) ? r.se_gamma / (r.gamma_min * r.gamma_min * double(l))
                                        : 0.0;
            row.slices = r.slices_used;
            row.converged = r.converged;
            ds.rows[task] = row;
            size_t d = done.fetch_add(1) + 1;
            if (sc.progress) {
                std::lock_guard<std::mutex> lk(progress_mu);
                sc.progress(d, total);
            }
        }
    };
    int nw = std::max(1, sc.workers);
    if (nw == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::sort(ds.rows.begin(), ds.rows.end(), [](const DataRow& a, const DataRow& b) {
        if (a.l != b.l) return a.l < b.l;
        return a.w < b.w;
    });
    return ds;
}

// ---- crossing locator --------------------------------------------------------

struct Crossing {
    double w_lo = 0, w_hi = 0, w_star = 0;
};

// Sign changes of Lambda(L_max) - Lambda(L_min) over the common W grid.
inline std::vector<Crossing> find_crossing(const ScalingDataset& ds) {
    std::vector<Eigen::Index> ls;
    for (const auto& r : ds.rows)
        if (std::find(ls.begin(), ls.end(), r.l) == ls.end()) ls.push_back(r.l);
    if (ls.size() < 2)
        throw std::invalid_argument("find_crossing needs at least two distinct L");
    std::sort(ls.begin(), ls.end());
    Eigen::Index lmin = ls.front(), lmax = ls.back();
    auto curve = [&](Eigen::Index l) {
        std::vector<std::pair<double, double>> pts;
        for (const auto& r : ds.rows)
            if (r.l == l && std::isfinite(r.lambda)) pts.emplace_back(r.w, r.lambda);
        std::sort(pts.begin(), pts.end());
        return pts;
    };
    auto lo = curve(lmin), hi = curve(lmax);
    std::vector<std::pair<double, double>> delta;  // (w, hi - lo)
    for (const auto& [w, y] : lo) {
        for (const auto& [w2, y2] : hi)
            if (w2 == w) {
                delta.emplace_back(w, y2 - y);
                break;
            }
    }
    std::vector<Crossing> out;
    for (size_t k = 0; k + 1 < delta.size(); ++k) {
        double d0 = delta[k].second, d1 = delta[k + 1].second;
        if (d0 == 0) {
            out.push_back({delta[k].first, delta[k].first, delta[k].first});
        } else if (d0 * d1 < 0) {
            double w0 = delta[k].first, w1 = delta[k + 1].first;
            double ws = w0 + (w1 - w0) * d0 / (d0 - d1);
            out.push_back({w0, w1, ws});
        }
    }
    return out;
}

// ---- CSV ---------------------------------------------------------------------

inline void write_csv(const ScalingDataset& ds, std::ostream& os) {
    os << "class,dim,E_re,E_im,W,L,lambda,sigma_lambda,slices,converged\n";
    for (const auto& r : ds.rows) {
        os << ds.klass << ',' << ds.d << ',' << fmt_double(ds.energy.real()) << ','
           << fmt_double(ds.energy.imag()) << ',' << fmt_double(r.w) << ',' << r.l << ','
           << fmt_double(r.lambda) << ',' << fmt_double(r.sigma_lambda) << ',' << r.slices
           << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

inline void write_csv(const ScalingDataset& ds, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(ds, os);
}

inline ScalingDataset read_csv(std::istream& is) {
    ScalingDataset ds;
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty scaling CSV");
    if (trim(line) != "class,dim,E_re,E_im,W,L,lambda,sigma_lambda,slices,converged")
        throw std::runtime_error("unexpected scaling CSV header: " + line);
    bool first = true;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 10) throw std::runtime_error("bad scaling CSV row: " + line);
        if (first) {
            ds.klass = f[0];
            ds.d = int(std::stol(f[1]));
            ds.energy = cplx(parse_double(f[2]), parse_double(f[3]));
            first = false;
        }
        DataRow r;
        r.w = parse_double(f[4]);
        r.l = Eigen::Index(std::stol(f[5]));
        r.lambda = parse_double(f[6]);
        r.sigma_lambda = parse_double(f[7]);
        r.slices = Eigen::Index(std::stol(f[8]));
        r.converged = f[9] == "1";
        ds.rows.push_back(r);
    }
    return ds;
}

inline ScalingDataset read_csv_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_csv(is);
}

}  // namespace andloc::transfer
