#pragma once

// Rendering of fit results as fixed-layout table rows:
//   class | E | L-range | (m1,n1,m2,n2) | GOF | W_c[CI] | nu[CI] | y[CI] | Lambda_c[CI]
// Interval widths choose the number of decimals, so narrow intervals print
// more digits, e.g. "6.3201[6.3193, 6.3208]".

#include "common.hpp"
#include "fss.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace andloc::report {

namespace detail {

inline int digits_for(double width) {
    if (!std::isfinite(width) || width <= 0) return 4;
    int d = int(std::ceil(-std::log10(width))) + 1;
    return std::min(std::max(d, 1), 8);
}

inline std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace detail

// "6.3201[6.3193, 6.3208]" or a bare point estimate when no interval exists.
inline std::string value_with_ci(double v, const fss::Interval& iv) {
    if (!iv.valid()) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", v);
        return buf;
    }
    int d = detail::digits_for(iv.hi - iv.lo);
    return detail::fixed(v, d) + "[" + detail::fixed(iv.lo, d) + ", " + detail::fixed(iv.hi, d) +
           "]";
}

inline std::string energy_label(cplx e) {
    if (e.imag() == 0) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", e.real());
        return buf;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%g%+gi", e.real(), e.imag());
    return buf;
}

inline std::string table_header() {
    return "class | E | L-range | order | GOF | W_c | nu | y | Lambda_c";
}

inline std::string table_row(const fss::FitResult& fr, const std::string& klass, cplx energy) {
    std::string row = klass;
    row += " | " + energy_label(energy);
    char lr[48];
    std::snprintf(lr, sizeof lr, "%g-%g", fr.l_min, fr.l_max);
    row += " | ";
    row += lr;
    row += " | " + fr.order.str();
    char gof[32];
    std::snprintf(gof, sizeof gof, "%.2f", fr.gof_p);
    row += " | ";
    row += gof;
    row += " | " + value_with_ci(fr.params.w_c, fr.wc_ci);
    row += " | " + value_with_ci(fr.params.nu, fr.nu_ci);
    row += " | ";
    row += fr.order.n2 > 0 ? value_with_ci(fr.params.y, fr.y_ci) : std::string("-");
    row += " | " + value_with_ci(fr.lambda_c, fr.lambda_c_ci);
    return row;
}

// Warnings that should accompany a rendered row; empty when the fit is clean.
inline std::string row_warnings(const fss::FitResult& fr) {
    std::string w;
    auto add = [&](const std::string& s) {
        if (!w.empty()) w += "; ";
        w += s;
    };
    if (!fr.converged) add("fit did not converge");
    if (fr.gof_p < 0.05) add("goodness of fit below 0.05");
    if (fr.rank_deficient) add("flat parameter directions (fit unstable)");
    if (fr.ci_resamples == 0) add("no resampling run: point estimates only");
    else if (!fr.ci_reliable) add("interval refit failure rate above 5%");
    return w;
}

}  // namespace andloc::report
