// Command-line driver. Subcommands:
//   run       execute a TOML-described task (scan, fit, spectra, ginibre,
//             splitting, classify) and write outputs plus a manifest
//   fit       finite-size-scaling fit of an existing scan CSV
//   classify  symmetry class of a matrix given candidate operators
//   report    render a saved fit JSON as a table row
//
// Exit codes: 0 success, 2 configuration/input error, 3 numerical failure.

#include <andloc/config.hpp>
#include <andloc/fss.hpp>
#include <andloc/linalg.hpp>
#include <andloc/report.hpp>
#include <andloc/runner.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::string read_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw andloc::cli::ConfigError("cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

andloc::fss::ExpansionOrder parse_order_arg(const std::string& s) {
    auto f = andloc::split(s, ',');
    if (f.size() != 4)
        throw andloc::cli::ConfigError("order must be 'm1,n1,m2,n2'; got '" + s + "'");
    andloc::fss::ExpansionOrder o{std::stoi(f[0]), std::stoi(f[1]), std::stoi(f[2]),
                                  std::stoi(f[3])};
    o.validate();
    return o;
}

int cmd_run(const std::string& config_path, std::optional<int> workers,
            std::optional<std::string> out_dir) {
    auto rc = andloc::cli::parse_config(read_file(config_path));
    andloc::cli::RunOverrides ov;
    ov.workers = workers;
    ov.out_dir = out_dir;
    auto man = andloc::cli::run(rc, ov);
    std::cerr << "wrote " << man.outputs.size() << " file(s) to "
              << ov.out_dir.value_or(rc.out_dir) << "\n";
    return 0;
}

int cmd_fit(const std::string& csv_path, const std::vector<std::string>& order_args,
            int resamples, std::uint64_t seed, double window,
            const std::optional<std::string>& out_dir) {
    auto ds = andloc::transfer::read_csv_file(csv_path);
    auto data = andloc::fss::from_dataset(ds);
    std::uint64_t digest = andloc::fss::dataset_digest(data);

    std::vector<andloc::fss::ExpansionOrder> orders;
    for (const auto& s : order_args) orders.push_back(parse_order_arg(s));

    andloc::fss::FitOptions opt;
    opt.w_window = window;
    try {
        auto crossings = andloc::transfer::find_crossing(ds);
        if (!crossings.empty()) opt.wc_hint = crossings.front().w_star;
    } catch (const std::exception&) {
    }

    if (out_dir) std::filesystem::create_directories(*out_dir);
    std::cout << andloc::report::table_header() << "\n";
    int failures = 0;
    std::string first_error;
    for (size_t oi = 0; oi < orders.size(); ++oi) {
        const auto& order = orders[oi];
        try {
            auto fr = andloc::fss::fit(data, order, std::nullopt, opt);
            if (fr.converged && resamples > 0) {
                std::uint64_t rs = andloc::rng::Stream::keyed(
                                       seed, andloc::rng::Tag::Resample, std::uint64_t(oi))
                                       .next_u64();
                andloc::fss::confidence(fr, data, resamples, rs, opt);
            }
            std::cout << andloc::report::table_row(fr, ds.klass, ds.energy) << "\n";
            std::string warn = andloc::report::row_warnings(fr);
            if (!warn.empty())
                std::cerr << "[fit " << order.str() << "] warning: " << warn << "\n";
            if (out_dir) {
                nlohmann::json fj = andloc::fss::fit_report_json(fr, digest);
                fj["class"] = ds.klass;
                fj["energy_re"] = ds.energy.real();
                fj["energy_im"] = ds.energy.imag();
                std::string fname = "fit_" + std::to_string(order.m1) +
                                    std::to_string(order.n1) + std::to_string(order.m2) +
                                    std::to_string(order.n2) + ".json";
                std::ofstream jf(std::filesystem::path(*out_dir) / fname);
                jf << fj.dump(2) << "\n";
            }
            if (!fr.converged) {
                ++failures;
                if (first_error.empty())
                    first_error = "fit " + order.str() + " did not converge";
            }
        } catch (const std::exception& e) {
            std::cerr << "[fit " << order.str() << "] " << e.what() << "\n";
            ++failures;
            if (first_error.empty()) first_error = e.what();
        }
    }
    if (failures == int(orders.size()))
        throw andloc::cli::NumericalError("all fits failed: " + first_error);
    return 0;
}

int cmd_classify(const std::string& matrix_csv, const std::string& ops_json, double tol) {
    auto h = andloc::cli::read_matrix_csv(matrix_csv);
    auto ops = andloc::cli::read_ops_json(ops_json);
    auto res = andloc::symmetry::classify(h, ops, tol);
    std::cout << (res.record ? res.record->name : "none") << "\n";
    if (!res.message.empty()) std::cerr << res.message << "\n";
    for (const auto& o : res.ops) {
        std::cerr << andloc::symmetry::to_string(o.op.kind) << " sign=" << o.op.sign
                  << (o.check.holds ? " holds" : " violated")
                  << " residual=" << o.check.relation_residual
                  << (o.derived ? " (derived)" : "") << "\n";
    }
    return 0;
}

int cmd_report(const std::vector<std::string>& fit_jsons) {
    std::cout << andloc::report::table_header() << "\n";
    for (const auto& path : fit_jsons) {
        nlohmann::json j;
        std::ifstream is(path);
        if (!is) throw andloc::cli::ConfigError("cannot open " + path);
        try {
            is >> j;
        } catch (const std::exception& e) {
            throw andloc::cli::ConfigError(path + ": " + std::string(e.what()));
        }
        auto fr = andloc::fss::fit_report_from_json(j);
        std::string klass = j.value("class", std::string("-"));
        andloc::cplx energy(j.value("energy_re", 0.0), j.value("energy_im", 0.0));
        std::cout << andloc::report::table_row(fr, klass, energy) << "\n";
        std::string warn = andloc::report::row_warnings(fr);
        if (!warn.empty()) std::cerr << "[" << path << "] warning: " << warn << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    andloc::linalg::pin_single_thread();

    CLI::App app{"transfer-matrix localization toolkit"};
    app.require_subcommand(1);

    auto* run_cmd = app.add_subcommand("run", "execute a TOML task description");
    std::string config_path;
    run_cmd->add_option("config", config_path, "TOML config file")->required();
    std::optional<int> run_workers;
    run_cmd->add_option("--workers", run_workers, "override worker count");
    std::optional<std::string> run_out;
    run_cmd->add_option("--out", run_out, "override output directory");

    auto* fit_cmd = app.add_subcommand("fit", "scaling fit of a scan CSV");
    std::string fit_csv;
    fit_cmd->add_option("data", fit_csv, "scan CSV (class,dim,E_re,E_im,W,L,...)")->required();
    std::vector<std::string> fit_orders;
    fit_cmd->add_option("--orders", fit_orders, "expansion order m1,n1,m2,n2 (repeatable)")
        ->required();
    int fit_resamples = 200;
    fit_cmd->add_option("--resamples", fit_resamples, "bootstrap resamples (0 disables)");
    std::uint64_t fit_seed = 1;
    fit_cmd->add_option("--seed", fit_seed, "bootstrap seed");
    double fit_window = 0.3;
    fit_cmd->add_option("--window", fit_window, "relative disorder window around W_c");
    std::optional<std::string> fit_out;
    fit_cmd->add_option("--out", fit_out, "directory for fit JSON files");

    auto* cls_cmd = app.add_subcommand("classify", "symmetry class of a matrix");
    std::string cls_matrix, cls_ops;
    cls_cmd->add_option("matrix", cls_matrix, "matrix CSV (i,j,re,im)")->required();
    cls_cmd->add_option("--ops", cls_ops, "candidate operators JSON")->required();
    double cls_tol = 1e-10;
    cls_cmd->add_option("--tol", cls_tol, "residual tolerance");

    auto* rep_cmd = app.add_subcommand("report", "render fit JSON files as a table");
    std::vector<std::string> rep_files;
    rep_cmd->add_option("fits", rep_files, "fit JSON files")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(run_cmd)) return cmd_run(config_path, run_workers, run_out);
        if (app.got_subcommand(fit_cmd))
            return cmd_fit(fit_csv, fit_orders, fit_resamples, fit_seed, fit_window, fit_out);
        if (app.got_subcommand(cls_cmd)) return cmd_classify(cls_matrix, cls_ops, cls_tol);
        if (app.got_subcommand(rep_cmd)) return cmd_report(rep_files);
    } catch (const andloc::cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const andloc::cli::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
