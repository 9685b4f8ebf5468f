#pragma once

// Task execution behind the command-line driver. Each task kind reads its
// blocks from RunConfig, dispatches independent work items across a small
// thread pool (results land in index-addressed slots, so outputs are
// identical for any worker count), writes data files, and records a manifest.

#include "common.hpp"
#include "config.hpp"
#include "fss.hpp"
#include "report.hpp"
#include "spectra.hpp"
#include "transfer.hpp"

#include <json.hpp>

#include <atomic>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace andloc::cli {

struct TaskEntry {
    std::string name;
    std::uint64_t seed = 0;
    std::string status;  // "ok" or "failed: ..."
};

struct RunManifest {
    std::string config_digest;
    std::string version = kVersion;
    std::uint64_t master_seed = 0;
    int workers = 1;
    std::string started_utc, finished_utc;
    std::vector<TaskEntry> tasks;
    std::vector<std::string> outputs;
};

namespace detail {

inline std::string utc_now() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

template <class Fn>
void parallel_for(size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    auto loop = [&]() {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    int nt = std::min<int>(workers, int(n));
    pool.reserve(size_t(nt));
    for (int t = 0; t < nt; ++t) pool.emplace_back(loop);
    for (auto& th : pool) th.join();
}

}  // namespace detail

inline nlohmann::json manifest_json(const RunManifest& m) {
    nlohmann::json j;
    j["config_digest"] = m.config_digest;
    j["artifact_version"] = m.version;
    j["master_seed"] = m.master_seed;
    j["workers"] = m.workers;
    j["started_utc"] = m.started_utc;
    j["finished_utc"] = m.finished_utc;
    nlohmann::json tasks = nlohmann::json::array();
    for (const auto& t : m.tasks)
        tasks.push_back({{"name", t.name}, {"seed", t.seed}, {"status", t.status}});
    j["tasks"] = tasks;
    j["outputs"] = m.outputs;
    return j;
}

// ---- classify inputs ------------------------------------------------------------

// Sparse complex matrix as CSV rows `i,j,re,im` (0-based), dimension inferred.
inline Mat read_matrix_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open matrix file " + path);
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("empty matrix file " + path);
    if (trim(line) != "i,j,re,im")
        throw ConfigError("matrix CSV must start with header 'i,j,re,im'; got: " + line);
    struct Entry {
        Eigen::Index i, j;
        cplx v;
    };
    std::vector<Entry> entries;
    Eigen::Index dim = 0;
    while (std::getline(is, line)) {
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 4) throw ConfigError("bad matrix CSV row: " + line);
        Entry e;
        e.i = Eigen::Index(std::stoll(f[0]));
        e.j = Eigen::Index(std::stoll(f[1]));
        e.v = cplx(parse_double(f[2]), parse_double(f[3]));
        if (e.i < 0 || e.j < 0) throw ConfigError("negative index in matrix CSV: " + line);
        dim = std::max(dim, std::max(e.i, e.j) + 1);
        entries.push_back(e);
    }
    if (entries.empty()) throw ConfigError("matrix CSV has no entries: " + path);
    Mat h = Mat::Zero(dim, dim);
    for (const auto& e : entries) h(e.i, e.j) += e.v;
    return h;
}

// Candidate operators as JSON: {"ops": [{"kind": "TRS", "u_re": [[..]],
// "u_im": [[..]], "sign": 1}, ...]}. The sign is optional for the antiunitary
// kinds; when absent it is measured from U U*.
inline std::vector<symmetry::SymmetryOp> read_ops_json(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open ops file " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const std::exception& e) {
        throw ConfigError("ops file " + path + ": " + e.what());
    }
    if (!j.contains("ops") || !j["ops"].is_array())
        throw ConfigError("ops file needs a top-level 'ops' array");
    std::vector<symmetry::SymmetryOp> out;
    for (const auto& o : j["ops"]) {
        std::string kind = o.value("kind", "");
        symmetry::OpKind k;
        if (kind == "TRS") k = symmetry::OpKind::TRS;
        else if (kind == "PHS") k = symmetry::OpKind::PHS;
        else if (kind == "TRSdag") k = symmetry::OpKind::TRSdag;
        else if (kind == "PHSdag") k = symmetry::OpKind::PHSdag;
        else if (kind == "CS") k = symmetry::OpKind::CS;
        else if (kind == "SLS") k = symmetry::OpKind::SLS;
        else throw ConfigError("unknown op kind '" + kind + "'");
        if (!o.contains("u_re") || !o.contains("u_im"))
            throw ConfigError("op '" + kind + "' needs 'u_re' and 'u_im' matrices");
        auto re = o["u_re"].get<std::vector<std::vector<double>>>();
        auto im = o["u_im"].get<std::vector<std::vector<double>>>();
        if (re.empty() || re.size() != im.size())
            throw ConfigError("op '" + kind + "': u_re/u_im shape mismatch");
        const size_t n = re.size();
        Mat u;
        u.resize(Eigen::Index(n), Eigen::Index(n));
        for (size_t r = 0; r < n; ++r) {
            if (re[r].size() != n || im[r].size() != n)
                throw ConfigError("op '" + kind + "': unitary must be square");
            for (size_t c = 0; c < n; ++c)
                u(Eigen::Index(r), Eigen::Index(c)) = cplx(re[r][c], im[r][c]);
        }
        int sign = 0;
        if (o.contains("sign")) {
            sign = o["sign"].get<int>();
        } else if (k != symmetry::OpKind::CS && k != symmetry::OpKind::SLS) {
            Mat uu = u * u.conjugate();
            cplx tr = uu.trace() / double(u.rows());
            sign = tr.real() > 0.5 ? 1 : (tr.real() < -0.5 ? -1 : 0);
            if (sign == 0)
                throw ConfigError("op '" + kind +
                                  "': U U* is not a +-1 scalar; give an explicit 'sign'");
        }
        out.push_back({k, std::move(u), sign});
    }
    return out;
}

// ---- the runner -----------------------------------------------------------------

struct RunOverrides {
    std::optional<int> workers;
    std::optional<std::string> out_dir;
};

namespace detail {

inline std::string order_suffix(const fss::ExpansionOrder& o) {
    return std::to_string(o.m1) + std::to_string(o.n1) + std::to_string(o.m2) +
           std::to_string(o.n2);
}

inline transfer::ScanConfig scan_config(const RunConfig& rc, int workers,
                                        std::ostream* progress) {
    transfer::ScanConfig sc;
    sc.klass = rc.model->klass;
    sc.d = rc.model->dimension;
    sc.transverse_periodic = rc.model->transverse_periodic;
    sc.w_grid = rc.model->w_grid;
    sc.l_list = rc.model->l_list;
    sc.transfer = rc.transfer;
    sc.master_seed = rc.seed;
    sc.workers = workers;
    if (progress) {
        sc.progress = [progress](size_t done, size_t total) {
            (*progress) << "[scan] " << done << "/" << total << "\n";
        };
    }
    return sc;
}

inline void record_scan_tasks(RunManifest& man, const transfer::ScanConfig& sc) {
    for (size_t li = 0; li < sc.l_list.size(); ++li)
        for (size_t wi = 0; wi < sc.w_grid.size(); ++wi) {
            TaskEntry t;
            t.name = "scan W=" + fmt_double(sc.w_grid[wi]) +
                     " L=" + std::to_string(long(sc.l_list[li]));
            t.seed = rng::Stream::keyed(sc.master_seed, rng::Tag::ScanPoint, std::uint64_t(wi),
                                        std::uint64_t(li))
                         .next_u64();
            t.status = "ok";
            man.tasks.push_back(std::move(t));
        }
}

inline model::ModelInstance build_closed(const ModelBlock& mb, double w, std::uint64_t seed,
                                         Eigen::Index l) {
    model::LatticeSpec lat{mb.dimension, l, l, mb.transverse_periodic,
                           model::Role::ClosedPeriodic};
    if (mb.klass == "AI") return model::build_o1(lat, w, seed);
    return model::build_su2(lat, transfer::disorder_for(mb.klass, w),
                            model::ClassTag::of(mb.klass), seed);
}

}  // namespace detail

inline RunManifest run(const RunConfig& rc, const RunOverrides& ov = {},
                       std::ostream* progress = &std::cerr) {
    namespace fs = std::filesystem;
    const int workers = ov.workers.value_or(rc.workers);
    if (workers < 1) throw ConfigError("worker count must be >= 1");
    const std::string out_dir = ov.out_dir.value_or(rc.out_dir);
    fs::create_directories(out_dir);
    auto out_path = [&](const std::string& name) {
        return (fs::path(out_dir) / (rc.prefix + "_" + name)).string();
    };

    RunManifest man;
    man.config_digest = config_digest(rc.doc);
    man.master_seed = rc.seed;
    man.workers = workers;
    man.started_utc = detail::utc_now();

    auto emit = [&](const std::string& name) {
        man.outputs.push_back(rc.prefix + "_" + name);
    };

    switch (rc.task) {
        case TaskKind::LambdaScan: {
            auto sc = detail::scan_config(rc, workers, progress);
            detail::record_scan_tasks(man, sc);
            transfer::ScalingDataset ds = transfer::lambda_scan(sc);
            transfer::write_csv(ds, out_path("scan.csv"));
            emit("scan.csv");
            break;
        }
        case TaskKind::FssFit: {
            transfer::ScalingDataset ds;
            if (!rc.fss->input_csv.empty()) {
                ds = transfer::read_csv_file(rc.fss->input_csv);
                TaskEntry t;
                t.name = "read " + rc.fss->input_csv;
                t.seed = 0;
                t.status = "ok";
                man.tasks.push_back(std::move(t));
            } else {
                auto sc = detail::scan_config(rc, workers, progress);
                detail::record_scan_tasks(man, sc);
                ds = transfer::lambda_scan(sc);
                transfer::write_csv(ds, out_path("scan.csv"));
                emit("scan.csv");
            }
            std::vector<fss::DataPoint> data = fss::from_dataset(ds);
            std::uint64_t digest = fss::dataset_digest(data);

            fss::FitOptions opt;
            opt.w_window = rc.fss->w_window;
            try {
                auto crossings = transfer::find_crossing(ds);
                if (!crossings.empty()) opt.wc_hint = crossings.front().w_star;
            } catch (const std::exception&) {
            }

            int failures = 0;
            std::string first_error;
            std::cout << report::table_header() << "\n";
            for (size_t oi = 0; oi < rc.fss->orders.size(); ++oi) {
                const auto& order = rc.fss->orders[oi];
                TaskEntry t;
                t.name = "fit order " + order.str();
                t.seed = rng::Stream::keyed(rc.seed, rng::Tag::Resample, std::uint64_t(oi))
                             .next_u64();
                try {
                    fss::FitResult fr = fss::fit(data, order, std::nullopt, opt);
                    if (fr.converged) fss::confidence(fr, data, rc.fss->resamples, t.seed, opt);
                    std::string fname = "fit_" + detail::order_suffix(order) + ".json";
                    nlohmann::json fj = fss::fit_report_json(fr, digest);
                    fj["class"] = ds.klass;
                    fj["energy_re"] = ds.energy.real();
                    fj["energy_im"] = ds.energy.imag();
                    std::ofstream jf(out_path(fname));
                    jf << fj.dump(2) << "\n";
                    emit(fname);
                    std::cout << report::table_row(fr, ds.klass, ds.energy) << "\n";
                    std::string warn = report::row_warnings(fr);
                    if (!warn.empty() && progress)
                        (*progress) << "[fit " << order.str() << "] warning: " << warn << "\n";
                    t.status = fr.converged ? "ok" : "failed: did not converge";
                    if (!fr.converged) {
                        ++failures;
                        if (first_error.empty()) first_error = "fit " + order.str() +
                                                               " did not converge";
                    }
                } catch (const std::exception& e) {
                    t.status = std::string("failed: ") + e.what();
                    ++failures;
                    if (first_error.empty()) first_error = e.what();
                }
                man.tasks.push_back(std::move(t));
            }
            if (failures == int(rc.fss->orders.size()))
                throw NumericalError("all fits failed: " + first_error);
            break;
        }
        case TaskKind::Spectra: {
            const auto& mb = *rc.model;
            const auto& sb = *rc.spectra_blk;
            const double w = mb.w_grid.front();
            const Eigen::Index l = mb.l_list.front();
            std::vector<spectra::SpectrumResult> results(size_t(sb.samples));
            std::atomic<int> done{0};
            detail::parallel_for(size_t(sb.samples), workers, [&](size_t k) {
                std::uint64_t seed =
                    rng::Stream::keyed(rc.seed, rng::Tag::ClassSample, std::uint64_t(k))
                        .next_u64();
                auto m = detail::build_closed(mb, w, seed, l);
                results[k] = spectra::diagonalize(m.assemble_full(sb.cap), sb.want_vectors,
                                                  sb.cap);
                results[k].source = mb.klass + " W=" + fmt_double(w) +
                                    " L=" + std::to_string(long(l)) + " seed=" + hex64(seed);
                int d = ++done;
                if (progress && (d % 16 == 0 || d == sb.samples))
                    (*progress) << "[spectra] " << d << "/" << sb.samples << "\n";
            });
            for (size_t k = 0; k < results.size(); ++k) {
                TaskEntry t;
                t.name = "sample " + std::to_string(k);
                t.seed = rng::Stream::keyed(rc.seed, rng::Tag::ClassSample, std::uint64_t(k))
                             .next_u64();
                t.status = "ok";
                man.tasks.push_back(std::move(t));
            }
            spectra::write_spectrum_csv(out_path("spectrum.csv"), results.front());
            emit("spectrum.csv");
            auto hist = spectra::dos_hist(results, sb.axis, sb.bins);
            spectra::write_dos_csv(out_path("dos.csv"), hist);
            emit("dos.csv");
            if (sb.want_vectors) {
                spectra::write_overlay_csv(out_path("overlay.csv"),
                                           spectra::ipr_overlay(results));
                emit("overlay.csv");
            }
            break;
        }
        case TaskKind::GinibreTask: {
            const auto& gb = *rc.ginibre_blk;
            std::vector<spectra::SpectrumResult> results(size_t(gb.samples));
            detail::parallel_for(size_t(gb.samples), workers, [&](size_t k) {
                std::uint64_t seed =
                    rng::Stream::keyed(rc.seed, rng::Tag::Ginibre, std::uint64_t(k)).next_u64();
                results[k] =
                    spectra::diagonalize(spectra::ginibre(gb.ensemble, gb.n, seed), false,
                                         1 << 14);
            });
            double mean_real = 0;
            nlohmann::json counts = nlohmann::json::array();
            for (size_t k = 0; k < results.size(); ++k) {
                auto c = spectra::count_real(results[k].eigenvalues);
                counts.push_back(long(c));
                mean_real += double(c);
                TaskEntry t;
                t.name = "sample " + std::to_string(k);
                t.seed = rng::Stream::keyed(rc.seed, rng::Tag::Ginibre, std::uint64_t(k))
                             .next_u64();
                t.status = "ok";
                man.tasks.push_back(std::move(t));
            }
            mean_real /= double(gb.samples);
            auto hist = spectra::dos_hist(results, spectra::DosAxis::ImagPart, gb.bins);
            spectra::write_dos_csv(out_path("dos.csv"), hist);
            emit("dos.csv");
            nlohmann::json j;
            j["ensemble"] = gb.ensemble == spectra::Ginibre::GinUE   ? "GinUE"
                            : gb.ensemble == spectra::Ginibre::GinOE ? "GinOE"
                                                                     : "GinSE";
            j["n"] = long(gb.n);
            j["samples"] = gb.samples;
            j["mean_real_count"] = mean_real;
            if (gb.ensemble == spectra::Ginibre::GinOE)
                j["expected_real_count"] = std::sqrt(2.0 * double(gb.n) / M_PI);
            j["real_counts"] = counts;
            std::ofstream jf(out_path("ginibre.json"));
            jf << j.dump(2) << "\n";
            emit("ginibre.json");
            break;
        }
        case TaskKind::Splitting: {
            const auto& sb = *rc.splitting_blk;
            spectra::SplittingConfig cfg;
            cfg.l = sb.l;
            cfg.w_base = sb.w_base;
            cfg.eta = sb.eta;
            cfg.samples = sb.samples;
            cfg.seed = rc.seed;
            cfg.bins = sb.bins;
            spectra::SplittingStats st;
            try {
                st = spectra::splitting_stats(cfg);
            } catch (const std::exception& e) {
                throw NumericalError(e.what());
            }
            TaskEntry t;
            t.name = "splitting " + std::to_string(sb.samples) + " samples";
            t.seed = rc.seed;
            t.status = "ok";
            man.tasks.push_back(std::move(t));
            spectra::write_dos_csv(out_path("splitting_hist.csv"), st.hist);
            emit("splitting_hist.csv");
            nlohmann::json j;
            j["splittings"] = st.s.size();
            j["discarded"] = st.discarded;
            j["levels_total"] = st.total;
            j["beta_hat"] = st.beta_hat;
            std::ofstream jf(out_path("splitting.json"));
            jf << j.dump(2) << "\n";
            emit("splitting.json");
            break;
        }
        case TaskKind::Classify: {
            const auto& cb = *rc.classify_blk;
            Mat h = read_matrix_csv(cb.matrix_csv);
            auto ops = read_ops_json(cb.ops_json);
            auto res = symmetry::classify(h, ops, cb.tol);
            nlohmann::json j;
            j["class"] = res.record ? res.record->name : "none";
            j["ambiguous"] = res.ambiguous;
            if (!res.message.empty()) j["message"] = res.message;
            nlohmann::json jops = nlohmann::json::array();
            for (const auto& o : res.ops) {
                nlohmann::json e;
                e["kind"] = symmetry::to_string(o.op.kind);
                e["sign"] = o.op.sign;
                e["holds"] = o.check.holds;
                e["relation_residual"] = o.check.relation_residual;
                e["derived"] = o.derived;
                jops.push_back(e);
            }
            j["ops"] = jops;
            std::ofstream jf(out_path("classify.json"));
            jf << j.dump(2) << "\n";
            emit("classify.json");
            std::cout << (res.record ? res.record->name : "none") << "\n";
            TaskEntry t;
            t.name = "classify " + cb.matrix_csv;
            t.seed = 0;
            t.status = res.record ? "ok" : "no matching class";
            man.tasks.push_back(std::move(t));
            break;
        }
    }

    man.finished_utc = detail::utc_now();
    std::ofstream mf(out_path("manifest.json"));
    mf << manifest_json(man).dump(2) << "\n";
    man.outputs.push_back(rc.prefix + "_manifest.json");
    return man;
}

}  // namespace andloc::cli
