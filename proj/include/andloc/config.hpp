#pragma once

// Run configuration: one TOML file describing a batch task. Parsing is strict
// (unknown task kinds, missing blocks, absent seed are errors) so a config
// mistake surfaces before any compute starts.

#include "common.hpp"
#include "fss.hpp"
#include "spectra.hpp"
#include "toml.hpp"
#include "transfer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace andloc::cli {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class TaskKind { LambdaScan, FssFit, Spectra, GinibreTask, Splitting, Classify };

inline const char* to_string(TaskKind k) {
    switch (k) {
        case TaskKind::LambdaScan: return "lambda-scan";
        case TaskKind::FssFit: return "fss-fit";
        case TaskKind::Spectra: return "spectra";
        case TaskKind::GinibreTask: return "ginibre";
        case TaskKind::Splitting: return "splitting";
        case TaskKind::Classify: return "classify";
    }
    return "?";
}

struct ModelBlock {
    std::string klass = "AI";
    int dimension = 3;
    std::vector<Eigen::Index> l_list;
    std::vector<double> w_grid;
    cplx energy{0, 0};
    bool transverse_periodic = true;
};

struct FssBlock {
    std::vector<fss::ExpansionOrder> orders;
    double w_window = 0.3;
    int resamples = 200;
    std::string input_csv;  // when set, fit this dataset instead of scanning
};

struct SpectraBlock {
    int samples = 100;
    int bins = 0;
    spectra::DosAxis axis = spectra::DosAxis::ImagPart;
    bool want_vectors = false;
    Eigen::Index cap = 8192;
};

struct GinibreBlock {
    spectra::Ginibre ensemble = spectra::Ginibre::GinUE;
    Eigen::Index n = 100;
    int samples = 1;
    int bins = 0;
};

struct SplittingBlock {
    Eigen::Index l = 8;
    double w_base = 3.0;
    double eta = 0.01;
    int samples = 200;
    int bins = 0;
};

struct ClassifyBlock {
    std::string matrix_csv;
    std::string ops_json;
    double tol = 1e-10;
};

struct RunConfig {
    TaskKind task = TaskKind::LambdaScan;
    std::uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = "out";
    std::string prefix = "run";
    std::optional<ModelBlock> model;
    transfer::TransferConfig transfer;
    std::optional<FssBlock> fss;
    std::optional<SpectraBlock> spectra_blk;
    std::optional<GinibreBlock> ginibre_blk;
    std::optional<SplittingBlock> splitting_blk;
    std::optional<ClassifyBlock> classify_blk;
    toml::Document doc;  // canonical source, hashed for the manifest
};

namespace detail {

inline const toml::Value& require(const toml::Document& doc, const std::string& sec,
                                  const std::string& key) {
    if (!doc.has(sec, key))
        throw ConfigError("missing required key '" + (sec.empty() ? key : sec + "." + key) + "'");
    return doc.at(sec, key);
}

inline double num(const toml::Value& v, const std::string& what) {
    if (!v.is_number()) throw ConfigError("'" + what + "' must be a number");
    return v.number();
}

inline long long integer(const toml::Value& v, const std::string& what) {
    if (v.kind != toml::Value::Kind::Int) throw ConfigError("'" + what + "' must be an integer");
    return v.i;
}

inline std::string str(const toml::Value& v, const std::string& what) {
    if (v.kind != toml::Value::Kind::String) throw ConfigError("'" + what + "' must be a string");
    return v.s;
}

inline bool boolean(const toml::Value& v, const std::string& what) {
    if (v.kind != toml::Value::Kind::Bool) throw ConfigError("'" + what + "' must be a boolean");
    return v.b;
}

inline std::vector<double> num_array(const toml::Value& v, const std::string& what) {
    if (v.kind != toml::Value::Kind::Array) throw ConfigError("'" + what + "' must be an array");
    std::vector<double> out;
    for (const auto& e : v.arr) out.push_back(num(e, what));
    return out;
}

template <class T>
T get_or(const toml::Document& doc, const std::string& sec, const std::string& key, T dflt);

template <>
inline double get_or<double>(const toml::Document& doc, const std::string& sec,
                             const std::string& key, double dflt) {
    return doc.has(sec, key) ? num(doc.at(sec, key), sec + "." + key) : dflt;
}

template <>
inline long long get_or<long long>(const toml::Document& doc, const std::string& sec,
                                   const std::string& key, long long dflt) {
    return doc.has(sec, key) ? integer(doc.at(sec, key), sec + "." + key) : dflt;
}

template <>
inline bool get_or<bool>(const toml::Document& doc, const std::string& sec,
                         const std::string& key, bool dflt) {
    return doc.has(sec, key) ? boolean(doc.at(sec, key), sec + "." + key) : dflt;
}

template <>
inline std::string get_or<std::string>(const toml::Document& doc, const std::string& sec,
                                       const std::string& key, std::string dflt) {
    return doc.has(sec, key) ? str(doc.at(sec, key), sec + "." + key) : dflt;
}

inline ModelBlock parse_model(const toml::Document& doc) {
    ModelBlock m;
    m.klass = str(require(doc, "model", "class"), "model.class");
    m.dimension = int(integer(require(doc, "model", "dimension"), "model.dimension"));
    const auto& lv = require(doc, "model", "l");
    if (lv.kind != toml::Value::Kind::Array) throw ConfigError("'model.l' must be an array");
    for (const auto& e : lv.arr) m.l_list.push_back(Eigen::Index(integer(e, "model.l")));
    if (doc.has("model", "w")) {
        m.w_grid = num_array(doc.at("model", "w"), "model.w");
        if (doc.has("model", "w_from") || doc.has("model", "w_to") || doc.has("model", "w_count"))
            throw ConfigError("give either 'model.w' or the w_from/w_to/w_count grid, not both");
    } else {
        double lo = num(require(doc, "model", "w_from"), "model.w_from");
        double hi = num(require(doc, "model", "w_to"), "model.w_to");
        long long n = integer(require(doc, "model", "w_count"), "model.w_count");
        if (n < 1) throw ConfigError("'model.w_count' must be >= 1");
        if (n == 1) {
            m.w_grid.push_back(lo);
        } else {
            for (long long k = 0; k < n; ++k)
                m.w_grid.push_back(lo + (hi - lo) * double(k) / double(n - 1));
        }
    }
    if (m.w_grid.empty()) throw ConfigError("'model.w' grid is empty");
    m.energy = cplx(get_or<double>(doc, "model", "energy_re", 0.0),
                    get_or<double>(doc, "model", "energy_im", 0.0));
    m.transverse_periodic = get_or<bool>(doc, "model", "transverse_periodic", true);
    try {
        m.klass = symmetry::class_record(m.klass).name;  // canonical spelling downstream
    } catch (const std::exception& e) {
        throw ConfigError(std::string("model.class: ") + e.what());
    }
    if (m.dimension != 2 && m.dimension != 3)
        throw ConfigError("'model.dimension' must be 2 or 3");
    return m;
}

inline fss::ExpansionOrder parse_order(const toml::Value& v) {
    if (v.kind != toml::Value::Kind::Array || v.arr.size() != 4)
        throw ConfigError("an fss order must be a 4-element array [m1, n1, m2, n2]");
    fss::ExpansionOrder o;
    o.m1 = int(integer(v.arr[0], "order.m1"));
    o.n1 = int(integer(v.arr[1], "order.n1"));
    o.m2 = int(integer(v.arr[2], "order.m2"));
    o.n2 = int(integer(v.arr[3], "order.n2"));
    try {
        o.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("fss.orders: ") + e.what());
    }
    return o;
}

inline FssBlock parse_fss(const toml::Document& doc) {
    FssBlock f;
    const auto& ov = require(doc, "fss", "orders");
    if (ov.kind != toml::Value::Kind::Array || ov.arr.empty())
        throw ConfigError("'fss.orders' must be a nonempty array of [m1, n1, m2, n2] arrays");
    for (const auto& e : ov.arr) f.orders.push_back(parse_order(e));
    f.w_window = get_or<double>(doc, "fss", "w_window", 0.3);
    f.resamples = int(get_or<long long>(doc, "fss", "resamples", 200));
    f.input_csv = get_or<std::string>(doc, "fss", "input", std::string());
    if (f.resamples < 200) throw ConfigError("'fss.resamples' must be >= 200");
    return f;
}

}  // namespace detail

inline RunConfig parse_config(const std::string& text) {
    toml::Document doc;
    try {
        doc = toml::parse(text);
    } catch (const toml::ParseError& e) {
        throw ConfigError(std::string("config parse: ") + e.what());
    }
    RunConfig rc;
    rc.doc = doc;

    std::string task = detail::str(detail::require(doc, "", "task"), "task");
    if (task == "lambda-scan") rc.task = TaskKind::LambdaScan;
    else if (task == "fss-fit") rc.task = TaskKind::FssFit;
    else if (task == "spectra") rc.task = TaskKind::Spectra;
    else if (task == "ginibre") rc.task = TaskKind::GinibreTask;
    else if (task == "splitting") rc.task = TaskKind::Splitting;
    else if (task == "classify") rc.task = TaskKind::Classify;
    else
        throw ConfigError("unknown task '" + task +
                          "' (expected lambda-scan, fss-fit, spectra, ginibre, splitting, "
                          "classify)");

    if (!doc.has("", "seed"))
        throw ConfigError("'seed' is required; runs never seed from the clock");
    long long seed = detail::integer(doc.at("", "seed"), "seed");
    if (seed < 0) throw ConfigError("'seed' must be >= 0");
    rc.seed = std::uint64_t(seed);

    rc.workers = int(detail::get_or<long long>(doc, "", "workers", 1));
    if (rc.workers < 1) throw ConfigError("'workers' must be >= 1");
    rc.out_dir = detail::get_or<std::string>(doc, "output", "dir", "out");
    rc.prefix = detail::get_or<std::string>(doc, "output", "prefix", "run");

    rc.transfer.qr_interval =
        Eigen::Index(detail::get_or<long long>(doc, "transfer", "qr_interval", 8));
    rc.transfer.target_rel_error =
        detail::get_or<double>(doc, "transfer", "target_rel_error", 1e-3);
    rc.transfer.max_slices =
        Eigen::Index(detail::get_or<long long>(doc, "transfer", "max_slices", 100000));
    rc.transfer.block_count = int(detail::get_or<long long>(doc, "transfer", "block_count", 16));
    try {
        rc.transfer.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("transfer: ") + e.what());
    }

    const bool needs_model = rc.task == TaskKind::LambdaScan || rc.task == TaskKind::Spectra;
    if (doc.sections.count("model") && !doc.sections.at("model").empty())
        rc.model = detail::parse_model(doc);
    if (rc.task == TaskKind::FssFit) {
        rc.fss = detail::parse_fss(doc);
        if (rc.fss->input_csv.empty() && !rc.model)
            throw ConfigError("task fss-fit needs a [model] block or 'fss.input'");
    }
    if (needs_model && !rc.model)
        throw ConfigError(std::string("task ") + to_string(rc.task) + " needs a [model] block");
    if (rc.model) {
        rc.transfer.energy = rc.model->energy;
        if (rc.task == TaskKind::Spectra && rc.model->w_grid.size() != 1)
            throw ConfigError("task spectra needs exactly one disorder strength in model.w");
        if (rc.task == TaskKind::Spectra && rc.model->l_list.size() != 1)
            throw ConfigError("task spectra needs exactly one size in model.l");
    }

    if (rc.task == TaskKind::Spectra) {
        SpectraBlock s;
        s.samples = int(detail::get_or<long long>(doc, "spectra", "samples", 100));
        s.bins = int(detail::get_or<long long>(doc, "spectra", "bins", 0));
        std::string axis = detail::get_or<std::string>(doc, "spectra", "axis", "imag");
        if (axis == "imag") s.axis = spectra::DosAxis::ImagPart;
        else if (axis == "complex") s.axis = spectra::DosAxis::ComplexPlane2D;
        else throw ConfigError("'spectra.axis' must be \"imag\" or \"complex\"");
        s.want_vectors = detail::get_or<bool>(doc, "spectra", "want_vectors", false);
        s.cap = Eigen::Index(detail::get_or<long long>(doc, "spectra", "cap", 8192));
        if (s.samples < 1) throw ConfigError("'spectra.samples' must be >= 1");
        rc.spectra_blk = s;
    }

    if (rc.task == TaskKind::GinibreTask) {
        GinibreBlock g;
        std::string ens = detail::str(detail::require(doc, "ginibre", "ensemble"),
                                      "ginibre.ensemble");
        if (ens == "GinUE") g.ensemble = spectra::Ginibre::GinUE;
        else if (ens == "GinOE") g.ensemble = spectra::Ginibre::GinOE;
        else if (ens == "GinSE") g.ensemble = spectra::Ginibre::GinSE;
        else throw ConfigError("'ginibre.ensemble' must be GinUE, GinOE, or GinSE");
        g.n = Eigen::Index(detail::integer(detail::require(doc, "ginibre", "n"), "ginibre.n"));
        g.samples = int(detail::get_or<long long>(doc, "ginibre", "samples", 1));
        g.bins = int(detail::get_or<long long>(doc, "ginibre", "bins", 0));
        if (g.n < 1) throw ConfigError("'ginibre.n' must be >= 1");
        if (g.samples < 1) throw ConfigError("'ginibre.samples' must be >= 1");
        rc.ginibre_blk = g;
    }

    if (rc.task == TaskKind::Splitting) {
        SplittingBlock s;
        s.l = Eigen::Index(detail::get_or<long long>(doc, "splitting", "l", 8));
        s.w_base = detail::get_or<double>(doc, "splitting", "w_base", 3.0);
        s.eta = detail::get_or<double>(doc, "splitting", "eta", 0.01);
        s.samples = int(detail::get_or<long long>(doc, "splitting", "samples", 200));
        s.bins = int(detail::get_or<long long>(doc, "splitting", "bins", 0));
        if (s.samples < 1) throw ConfigError("'splitting.samples' must be >= 1");
        if (!(s.eta >= 0)) throw ConfigError("'splitting.eta' must be >= 0");
        rc.splitting_blk = s;
    }

    if (rc.task == TaskKind::Classify) {
        ClassifyBlock c;
        c.matrix_csv = detail::str(detail::require(doc, "classify", "matrix"),
                                   "classify.matrix");
        c.ops_json = detail::str(detail::require(doc, "classify", "ops"), "classify.ops");
        c.tol = detail::get_or<double>(doc, "classify", "tol", 1e-10);
        rc.classify_blk = c;
    }

    return rc;
}

inline std::string config_digest(const toml::Document& doc) { return hex64(toml::digest(doc)); }

}  // namespace andloc::cli
