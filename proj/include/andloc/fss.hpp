#pragma once

// Finite-size-scaling fits of normalized localization lengths.
//
// Lambda(W, L) is modeled as f(phi1, phi2) with a relevant field
// phi1 = u1(w) L^{1/nu} and one irrelevant field phi2 = u2(w) L^{-y},
// w = (W - W_c)/W_c. u1, u2 are polynomials in w and f a polynomial in the
// fields; the normalization ambiguity is fixed by a_{1,0} = a_{0,1} = 1 and
// b_{1,0} = 0, which are never free fit variables. chi^2 is minimized by a
// damped least-squares loop with a numerically differentiated Jacobian; nu
// and y are optimized through their logarithms so they stay positive.
//
// Parameter errors come from Monte-Carlo resampling: synthetic datasets are
// drawn around the fitted curve with the data's own error bars and refit, and
// the 2.5/97.5 percentiles per parameter form the 95% intervals.

#include "common.hpp"
#include "rng.hpp"
#include "transfer.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace andloc::fss {

struct DataPoint {
    double w = 0;       // disorder strength
    double l = 0;       // transverse size
    double lambda = 0;  // xi / L
    double sigma = 0;   // standard error of lambda
};

struct ExpansionOrder {
    int m1 = 2, n1 = 3, m2 = 0, n2 = 0;

    void validate() const {
        if (m1 < 0 || n1 < 1 || m2 < 0 || n2 < 0)
            throw std::invalid_argument("expansion orders must be nonnegative with n1 >= 1");
    }
    bool irrelevant() const { return n2 > 0; }
    std::string str() const {
        return "(" + std::to_string(m1) + "," + std::to_string(n1) + "," + std::to_string(m2) +
               "," + std::to_string(n2) + ")";
    }
};

struct ScalingParams {
    double w_c = 0;
    double nu = 1;
    double y = 1;  // ignored when the order has no irrelevant field
    RMat a;        // (n1+1) x (n2+1), a(1,0) = a(0,1) = 1
    RVec b1;       // m1+1 entries, b1(0) = 0
    RVec b2;       // m2+1 entries; empty when n2 = 0
};

inline double scaling_model(const ScalingParams& p, const ExpansionOrder& o, double w_dis,
                            double l) {
    double w = (w_dis - p.w_c) / p.w_c;
    double u1 = 0;
    for (int j = o.m1; j >= 1; --j) u1 = (u1 + p.b1(j)) * w;
    double phi1 = u1 * std::pow(l, 1.0 / p.nu);
    double phi2 = 0;
    if (o.n2 > 0) {
        double u2 = 0;
        for (int j = o.m2; j >= 0; --j) u2 = u2 * w + p.b2(j);
        phi2 = u2 * std::pow(l, -p.y);
    }
    double f = 0;
    double p1 = 1;
    for (int j1 = 0; j1 <= o.n1; ++j1) {
        double p2 = 1;
        for (int j2 = 0; j2 <= o.n2; ++j2) {
            f += p.a(j1, j2) * p1 * p2;
            p2 *= phi2;
        }
        p1 *= phi1;
    }
    return f;
}

// ---- goodness of fit --------------------------------------------------------

namespace detail {

// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
inline double gammq(double a, double x) {
    if (x < 0 || a <= 0) throw std::invalid_argument("gammq needs x >= 0, a > 0");
    if (x == 0) return 1.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - lg);
        return 1.0 - p;
    }
    const double fpmin = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / fpmin, d = 1.0 / b, h = d;
    for (int i = 1; i < 1000; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - lg) * h;
}

}  // namespace detail

inline double gof(double chi2, int dof) {
    if (dof < 1) throw std::invalid_argument("gof needs dof >= 1");
    if (chi2 < 0) throw std::invalid_argument("gof needs chi2 >= 0");
    return detail::gammq(0.5 * dof, 0.5 * chi2);
}

// ---- parameter packing ------------------------------------------------------

namespace detail {

struct ParamMap {
    ExpansionOrder o;
    int n_params = 0;

    explicit ParamMap(const ExpansionOrder& ord) : o(ord) {
        o.validate();
        int free_a = (o.n1 + 1) * (o.n2 + 1) - 1 - (o.n2 > 0 ? 1 : 0);
        n_params = 2 + (o.n2 > 0 ? 1 : 0) + free_a + o.m1 + (o.n2 > 0 ? o.m2 + 1 : 0);
    }

    RVec pack(const ScalingParams& p) const {
        RVec v(n_params);
        int k = 0;
        v(k++) = p.w_c;
        v(k++) = std::log(p.nu);
        if (o.n2 > 0) v(k++) = std::log(p.y);
        for (int j1 = 0; j1 <= o.n1; ++j1)
            for (int j2 = 0; j2 <= o.n2; ++j2) {
                if ((j1 == 1 && j2 == 0) || (j1 == 0 && j2 == 1)) continue;
                v(k++) = p.a(j1, j2);
            }
        for (int j = 1; j <= o.m1; ++j) v(k++) = p.b1(j);
        if (o.n2 > 0)
            for (int j = 0; j <= o.m2; ++j) v(k++) = p.b2(j);
        return v;
    }

    ScalingParams unpack(const RVec& v) const {
        ScalingParams p;
        int k = 0;
        p.w_c = v(k++);
        p.nu = std::exp(v(k++));
        p.y = o.n2 > 0 ? std::exp(v(k++)) : std::numeric_limits<double>::quiet_NaN();
        p.a = RMat::Zero(o.n1 + 1, o.n2 + 1);
        p.a(1, 0) = 1;
        if (o.n2 > 0) p.a(0, 1) = 1;
        for (int j1 = 0; j1 <= o.n1; ++j1)
            for (int j2 = 0; j2 <= o.n2; ++j2) {
                if ((j1 == 1 && j2 == 0) || (j1 == 0 && j2 == 1)) continue;
                p.a(j1, j2) = v(k++);
            }
        p.b1 = RVec::Zero(o.m1 + 1);
        for (int j = 1; j <= o.m1; ++j) p.b1(j) = v(k++);
        if (o.n2 > 0) {
            p.b2 = RVec(o.m2 + 1);
            for (int j = 0; j <= o.m2; ++j) p.b2(j) = v(k++);
        }
        return p;
    }
};

struct LmOutcome {
    RVec p;
    double chi2 = std::numeric_limits<double>::infinity();
    bool converged = false;
    bool rank_deficient = false;
    int iterations = 0;
};

template <class ResidualFn>
LmOutcome lm_minimize(const ResidualFn& residual, RVec p, int max_iter) {
    const int np = int(p.size());
    RVec r = residual(p);
    const int nd = int(r.size());
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    LmOutcome out;
    RMat jac(nd, np);
    int stall = 0;
    for (int it = 0; it < max_iter && !out.converged; ++it) {
        out.iterations = it + 1;
        for (int i = 0; i < np; ++i) {
            double h = 1e-6 * std::max(1.0, std::abs(p(i)));
            RVec pp = p, pm = p;
            pp(i) += h;
            pm(i) -= h;
            jac.col(i) = (residual(pm) - residual(pp)) / (2 * h);  // = d(f/sigma)/dp
        }
        RMat a = jac.transpose() * jac;
        RVec g = jac.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < 1e-8 || cost == 0) {
            out.converged = true;
            break;
        }
        bool accepted = false;
        for (int tries = 0; tries < 45; ++tries) {
            RMat damped = a;
            for (int i = 0; i < np; ++i) damped(i, i) += lambda * std::max(a(i, i), 1e-12);
            RVec delta = damped.ldlt().solve(g);
            if (!delta.allFinite()) {
                lambda *= 10;
                continue;
            }
            // step size collapsed: numerically at the optimum
            if (delta.norm() <= 1e-12 * (1.0 + p.norm())) {
                out.converged = true;
                break;
            }
            RVec pn = p + delta;
            RVec rn = residual(pn);
            double cn = rn.squaredNorm();
            if (std::isfinite(cn) && cn < cost) {
                double rel = (cost - cn) / std::max(cost, 1e-300);
                p = pn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda * 0.1, 1e-14);
                accepted = true;
                stall = rel < 1e-11 ? stall + 1 : 0;
                if (stall >= 2) out.converged = true;
                break;
            }
            lambda *= 10;
            if (lambda > 1e15) break;
        }
        if (!accepted && !out.converged) break;  // no downhill direction left
    }
    // curvature spectrum at the optimum flags flat directions
    for (int i = 0; i < np; ++i) {
        double h = 1e-6 * std::max(1.0, std::abs(p(i)));
        RVec pp = p, pm = p;
        pp(i) += h;
        pm(i) -= h;
        jac.col(i) = (residual(pm) - residual(pp)) / (2 * h);
    }
    Eigen::SelfAdjointEigenSolver<RMat> es(RMat(jac.transpose() * jac));
    double lo = es.eigenvalues()(0), hi = es.eigenvalues()(np - 1);
    out.rank_deficient = !(lo > 0) || hi / std::max(lo, 1e-300) > 1e13;
    out.p = p;
    out.chi2 = cost;
    return out;
}

}  // namespace detail

// ---- fitting ----------------------------------------------------------------

struct Interval {
    double lo = std::numeric_limits<double>::quiet_NaN();
    double hi = std::numeric_limits<double>::quiet_NaN();
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi); }
};

struct FitResult {
    ExpansionOrder order;
    ScalingParams params;
    double chi2 = 0;
    double gof_p = 0;
    int n_data = 0;
    int n_params = 0;
    bool converged = false;
    bool rank_deficient = false;
    std::string message;
    double lambda_c = 0;          // f(0, 0)
    double lambda_c_at_lmin = 0;  // f(0, u2(0) Lmin^-y); equals lambda_c when n2 = 0
    double l_min = 0, l_max = 0;
    Interval wc_ci, nu_ci, y_ci, lambda_c_ci;
    bool ci_reliable = false;
    int ci_resamples = 0, ci_failures = 0;
};

struct FitOptions {
    double w_window = 0.3;  // drop |w| > window relative to the W_c guess
    int max_iter = 400;
    double wc_hint = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

inline std::vector<DataPoint> prepare(std::vector<DataPoint> data, double wc_guess,
                                      double window) {
    for (const auto& d : data) {
        if (!(d.sigma > 0)) throw std::invalid_argument("data point with sigma <= 0");
        if (!(d.lambda > 0)) throw std::invalid_argument("data point with lambda <= 0");
        if (!(d.l >= 2)) throw std::invalid_argument("data point with L < 2");
    }
    if (window > 0 && wc_guess > 0) {
        data.erase(std::remove_if(data.begin(), data.end(),
                                  [&](const DataPoint& d) {
                                      return std::abs((d.w - wc_guess) / wc_guess) > window;
                                  }),
                   data.end());
    }
    std::sort(data.begin(), data.end(), [](const DataPoint& x, const DataPoint& y) {
        if (x.l != y.l) return x.l < y.l;
        if (x.w != y.w) return x.w < y.w;
        return x.lambda < y.lambda;
    });
    return data;
}

inline double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

inline FitResult fit(const std::vector<DataPoint>& raw, const ExpansionOrder& order,
                     const std::optional<ScalingParams>& init = std::nullopt,
                     const FitOptions& opt = {}) {
    order.validate();
    detail::ParamMap pm(order);

    double wc_guess = std::isfinite(opt.wc_hint) ? opt.wc_hint : 0;
    if (!(wc_guess > 0)) {
        std::vector<double> ws;
        for (const auto& d : raw) ws.push_back(d.w);
        wc_guess = detail::median(ws);
    }
    if (init) wc_guess = init->w_c;
    std::vector<DataPoint> data = detail::prepare(raw, wc_guess, opt.w_window);

    std::vector<double> ls;
    for (const auto& d : data)
        if (std::find(ls.begin(), ls.end(), d.l) == ls.end()) ls.push_back(d.l);
    if (ls.size() < 3) throw std::invalid_argument("fit needs data from at least 3 distinct L");
    const int nd = int(data.size());
    if (nd <= pm.n_params)
        throw std::invalid_argument("fit needs more data points than parameters (" +
                                    std::to_string(nd) + " <= " +
                                    std::to_string(pm.n_params) + ")");

    auto residual = [&](const RVec& v) {
        ScalingParams p = pm.unpack(v);
        RVec r(nd);
        for (int k = 0; k < nd; ++k)
            r(k) = (data[size_t(k)].lambda -
                    scaling_model(p, order, data[size_t(k)].w, data[size_t(k)].l)) /
                   data[size_t(k)].sigma;
        return r;
    };

    std::vector<RVec> starts;
    if (init) {
        starts.push_back(pm.pack(*init));
    } else {
        std::vector<double> lam_near;
        for (const auto& d : data)
            if (std::abs((d.w - wc_guess) / wc_guess) < 0.08) lam_near.push_back(d.lambda);
        if (lam_near.empty())
            for (const auto& d : data) lam_near.push_back(d.lambda);
        double a00 = detail::median(lam_near);
        for (double nu0 : {0.8, 1.0, 1.5, 2.5}) {
            std::vector<double> ys = order.n2 > 0 ? std::vector<double>{0.5, 1.0, 2.0}
                                                  : std::vector<double>{1.0};
            for (double y0 : ys) {
                ScalingParams p;
                p.w_c = wc_guess;
                p.nu = nu0;
                p.y = y0;
                p.a = RMat::Zero(order.n1 + 1, order.n2 + 1);
                p.a(0, 0) = a00;
                p.a(1, 0) = 1;
                if (order.n2 > 0) p.a(0, 1) = 1;
                p.b1 = RVec::Zero(order.m1 + 1);
                if (order.m1 >= 1) p.b1(1) = 1.0;
                if (order.n2 > 0) {
                    p.b2 = RVec::Zero(order.m2 + 1);
                    p.b2(0) = 0.5;
                }
                starts.push_back(pm.pack(p));
            }
        }
    }

    detail::LmOutcome best;
    for (const auto& s : starts) {
        detail::LmOutcome o = detail::lm_minimize(residual, s, opt.max_iter);
        bool better = (o.converged && !best.converged) ||
                      (o.converged == best.converged && o.chi2 < best.chi2);
        if (better) best = o;
    }

    FitResult res;
    res.order = order;
    res.params = pm.unpack(best.p);
    res.chi2 = best.chi2;
    res.n_data = nd;
    res.n_params = pm.n_params;
    res.converged = best.converged;
    res.rank_deficient = best.rank_deficient;
    if (!best.converged) res.message = "optimizer did not converge";
    if (best.rank_deficient)
        res.message += std::string(res.message.empty() ? "" : "; ") +
                       "flat parameter directions at the optimum (fit unstable)";
    res.gof_p = gof(res.chi2, nd - pm.n_params);
    res.l_min = *std::min_element(ls.begin(), ls.end());
    res.l_max = *std::max_element(ls.begin(), ls.end());
    res.lambda_c = res.params.a(0, 0);
    if (order.n2 > 0) {
        ScalingParams p0 = res.params;
        res.lambda_c_at_lmin = scaling_model(p0, order, p0.w_c, res.l_min);
    } else {
        res.lambda_c_at_lmin = res.lambda_c;
    }
    return res;
}

// Monte-Carlo confidence intervals; mutates fit's interval fields.
inline void confidence(FitResult& fr, const std::vector<DataPoint>& raw, int n_resamples,
                       std::uint64_t seed, const FitOptions& opt = {}) {
    if (n_resamples < 200)
        throw std::invalid_argument("confidence needs at least 200 resamples");
    if (!fr.converged) throw std::invalid_argument("confidence needs a converged fit");
    detail::ParamMap pm(fr.order);
    FitOptions ropt = opt;
    ropt.wc_hint = fr.params.w_c;
    std::vector<DataPoint> data = detail::prepare(raw, fr.params.w_c, opt.w_window);

    std::vector<double> wcs, nus, yss, lcs;
    int failures = 0;
    for (int rI = 0; rI < n_resamples; ++rI) {
        auto st = rng::Stream::keyed(seed, rng::Tag::Resample, std::uint64_t(rI));
        std::vector<DataPoint> synth = data;
        for (auto& d : synth) {
            double f = scaling_model(fr.params, fr.order, d.w, d.l);
            d.lambda = f + d.sigma * st.normal();
        }
        FitOptions one = ropt;
        one.w_window = 0;  // window already applied
        try {
            FitResult r = fit(synth, fr.order, fr.params, one);
            if (!r.converged) {
                ++failures;
                continue;
            }
            wcs.push_back(r.params.w_c);
            nus.push_back(r.params.nu);
            if (fr.order.n2 > 0) yss.push_back(r.params.y);
            lcs.push_back(r.lambda_c);
        } catch (const std::exception&) {
            ++failures;
        }
    }
    auto quantile = [](std::vector<double> v, double q) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        std::sort(v.begin(), v.end());
        double pos = q * double(v.size() - 1);
        size_t i = size_t(pos);
        double frac = pos - double(i);
        if (i + 1 >= v.size()) return v.back();
        return v[i] * (1 - frac) + v[i + 1] * frac;
    };
    auto ival = [&](const std::vector<double>& v) {
        return Interval{quantile(v, 0.025), quantile(v, 0.975)};
    };
    fr.wc_ci = ival(wcs);
    fr.nu_ci = ival(nus);
    if (fr.order.n2 > 0) fr.y_ci = ival(yss);
    fr.lambda_c_ci = ival(lcs);
    fr.ci_resamples = n_resamples;
    fr.ci_failures = failures;
    fr.ci_reliable = failures <= n_resamples / 20;
    if (!fr.ci_reliable)
        fr.message += std::string(fr.message.empty() ? "" : "; ") +
                      "more than 5% of interval refits failed; intervals unreliable";
}

// ---- order stability ----------------------------------------------------------

struct StabilityEntry {
    std::string label;
    FitResult fit;
};

struct StabilityReport {
    std::vector<StabilityEntry> entries;
    bool stable = true;
    std::string message;
};

inline StabilityReport order_stability(const std::vector<DataPoint>& data,
                                       const std::vector<ExpansionOrder>& orders,
                                       int n_resamples, std::uint64_t seed,
                                       const FitOptions& opt = {}) {
    if (orders.size() < 2)
        throw std::invalid_argument("order_stability needs at least two orders");
    StabilityReport rep;
    for (const auto& o : orders) {
        StabilityEntry e;
        e.label = "order " + o.str();
        e.fit = fit(data, o, std::nullopt, opt);
        if (e.fit.converged) confidence(e.fit, data, n_resamples, seed, opt);
        rep.entries.push_back(std::move(e));
    }
    // L-window truncation: drop the smallest L, refit with the first order
    {
        std::vector<double> ls;
        for (const auto& d : data)
            if (std::find(ls.begin(), ls.end(), d.l) == ls.end()) ls.push_back(d.l);
        std::sort(ls.begin(), ls.end());
        if (ls.size() >= 4) {
            std::vector<DataPoint> trunc;
            for (const auto& d : data)
                if (d.l > ls.front()) trunc.push_back(d);
            StabilityEntry e;
            e.label = "order " + orders.front().str() + ", L >= " + fmt_double(ls[1]);
            e.fit = fit(trunc, orders.front(), std::nullopt, opt);
            if (e.fit.converged) confidence(e.fit, trunc, n_resamples, seed, opt);
            rep.entries.push_back(std::move(e));
        }
    }
    auto inside = [](double x, const Interval& iv) {
        return iv.valid() && x >= iv.lo && x <= iv.hi;
    };
    for (size_t i = 0; i < rep.entries.size(); ++i)
        for (size_t j = i + 1; j < rep.entries.size(); ++j) {
            const FitResult& a = rep.entries[i].fit;
            const FitResult& b = rep.entries[j].fit;
            if (!a.converged || !b.converged) {
                rep.stable = false;
                rep.message = "a fit did not converge";
                continue;
            }
            bool ok = inside(a.params.w_c, b.wc_ci) && inside(b.params.w_c, a.wc_ci) &&
                      inside(a.params.nu, b.nu_ci) && inside(b.params.nu, a.nu_ci);
            if (!ok) {
                rep.stable = false;
                if (rep.message.empty())
                    rep.message = "parameters drift between " + rep.entries[i].label + " and " +
                                  rep.entries[j].label;
            }
        }
    return rep;
}

// ---- synthetic data ------------------------------------------------------------

inline std::vector<DataPoint> synthesize(const ScalingParams& p, const ExpansionOrder& o,
                                         const std::vector<double>& w_grid,
                                         const std::vector<double>& l_list, double rel_sigma,
                                         bool add_noise, std::uint64_t seed) {
    std::vector<DataPoint> out;
    auto st = rng::Stream::keyed(seed, rng::Tag::Synthetic, 1);
    for (double l : l_list)
        for (double w : w_grid) {
            double f = scaling_model(p, o, w, l);
            DataPoint d;
            d.w = w;
            d.l = l;
            d.sigma = rel_sigma * std::abs(f);
            d.lambda = f + (add_noise ? d.sigma * st.normal() : 0.0);
            out.push_back(d);
        }
    return out;
}

// ---- dataset adapters and reports ----------------------------------------------

inline std::vector<DataPoint> from_dataset(const transfer::ScalingDataset& ds,
                                           bool include_nonconverged = false) {
    std::vector<DataPoint> out;
    for (const auto& r : ds.rows) {
        if (!r.converged && !include_nonconverged) continue;
        if (!std::isfinite(r.lambda) || !(r.sigma_lambda > 0)) continue;
        out.push_back({r.w, double(r.l), r.lambda, r.sigma_lambda});
    }
    return out;
}

inline std::uint64_t dataset_digest(const std::vector<DataPoint>& data) {
    std::vector<DataPoint> d = data;
    std::sort(d.begin(), d.end(), [](const DataPoint& x, const DataPoint& y) {
        if (x.l != y.l) return x.l < y.l;
        if (x.w != y.w) return x.w < y.w;
        return x.lambda < y.lambda;
    });
    std::string s;
    for (const auto& p : d)
        s += fmt_double(p.w) + "," + fmt_double(p.l) + "," + fmt_double(p.lambda) + "," +
             fmt_double(p.sigma) + "\n";
    return fnv1a(s);
}

inline nlohmann::json interval_json(const Interval& iv) {
    if (!iv.valid()) return nullptr;
    return nlohmann::json{{"lo", iv.lo}, {"hi", iv.hi}};
}

inline nlohmann::json fit_report_json(const FitResult& fr, std::uint64_t digest) {
    nlohmann::json j;
    j["order"] = {fr.order.m1, fr.order.n1, fr.order.m2, fr.order.n2};
    j["w_c"] = fr.params.w_c;
    j["nu"] = fr.params.nu;
    if (fr.order.n2 > 0) j["y"] = fr.params.y;
    j["lambda_c"] = fr.lambda_c;
    j["lambda_c_at_lmin"] = fr.lambda_c_at_lmin;
    j["chi2"] = fr.chi2;
    j["gof"] = fr.gof_p;
    j["n_data"] = fr.n_data;
    j["n_params"] = fr.n_params;
    j["l_min"] = fr.l_min;
    j["l_max"] = fr.l_max;
    j["converged"] = fr.converged;
    j["rank_deficient"] = fr.rank_deficient;
    if (!fr.message.empty()) j["message"] = fr.message;
    std::vector<double> a(fr.params.a.data(), fr.params.a.data() + fr.params.a.size());
    j["a_col_major"] = a;
    j["b1"] = std::vector<double>(fr.params.b1.data(), fr.params.b1.data() + fr.params.b1.size());
    if (fr.order.n2 > 0)
        j["b2"] =
            std::vector<double>(fr.params.b2.data(), fr.params.b2.data() + fr.params.b2.size());
    j["wc_ci"] = interval_json(fr.wc_ci);
    j["nu_ci"] = interval_json(fr.nu_ci);
    j["y_ci"] = interval_json(fr.y_ci);
    j["lambda_c_ci"] = interval_json(fr.lambda_c_ci);
    j["ci_resamples"] = fr.ci_resamples;
    j["ci_failures"] = fr.ci_failures;
    j["ci_reliable"] = fr.ci_reliable;
    j["dataset_digest"] = hex64(digest);
    return j;
}

inline FitResult fit_report_from_json(const nlohmann::json& j) {
    FitResult fr;
    auto ord = j.at("order");
    fr.order = {ord.at(0).get<int>(), ord.at(1).get<int>(), ord.at(2).get<int>(),
                ord.at(3).get<int>()};
    fr.params.w_c = j.at("w_c").get<double>();
    fr.params.nu = j.at("nu").get<double>();
    fr.params.y = j.contains("y") ? j.at("y").get<double>()
                                  : std::numeric_limits<double>::quiet_NaN();
    fr.lambda_c = j.at("lambda_c").get<double>();
    fr.lambda_c_at_lmin = j.at("lambda_c_at_lmin").get<double>();
    fr.chi2 = j.at("chi2").get<double>();
    fr.gof_p = j.at("gof").get<double>();
    fr.n_data = j.at("n_data").get<int>();
    fr.n_params = j.at("n_params").get<int>();
    fr.l_min = j.at("l_min").get<double>();
    fr.l_max = j.at("l_max").get<double>();
    fr.converged = j.at("converged").get<bool>();
    fr.rank_deficient = j.at("rank_deficient").get<bool>();
    if (j.contains("message")) fr.message = j.at("message").get<std::string>();
    auto av = j.at("a_col_major").get<std::vector<double>>();
    fr.params.a = Eigen::Map<const RMat>(av.data(), fr.order.n1 + 1, fr.order.n2 + 1);
    auto b1v = j.at("b1").get<std::vector<double>>();
    fr.params.b1 = Eigen::Map<const RVec>(b1v.data(), Eigen::Index(b1v.size()));
    if (j.contains("b2")) {
        auto b2v = j.at("b2").get<std::vector<double>>();
        fr.params.b2 = Eigen::Map<const RVec>(b2v.data(), Eigen::Index(b2v.size()));
    }
    auto get_iv = [&](const char* key) {
        Interval iv;
        if (j.contains(key) && !j.at(key).is_null()) {
            iv.lo = j.at(key).at("lo").get<double>();
            iv.hi = j.at(key).at("hi").get<double>();
        }
        return iv;
    };
    fr.wc_ci = get_iv("wc_ci");
    fr.nu_ci = get_iv("nu_ci");
    fr.y_ci = get_iv("y_ci");
    fr.lambda_c_ci = get_iv("lambda_c_ci");
    fr.ci_resamples = j.value("ci_resamples", 0);
    fr.ci_failures = j.value("ci_failures", 0);
    fr.ci_reliable = j.value("ci_reliable", false);
    return fr;
}

}  // namespace andloc::fss
