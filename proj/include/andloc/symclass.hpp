#pragma once

// The 38 non-Hermitian symmetry classes, their defining sign data, and the
// Hermitian class each one maps to under Hermitization at a class-preserving
// reference energy.
//
// Sign conventions for a class record (0 means the symmetry is absent):
//   trs      U H* U^+  =  H,   sign = UU*          (T+)
//   phs      U H^T U^+ = -H,   sign = UU*          (P-)
//   trs_dag  U H^T U^+ =  H,   sign = UU*          (P+)
//   phs_dag  U H* U^+  = -H,   sign = UU*          (T-)
//   cs       U H^+ U^+ = -H,   U^2 = 1
//   sls      U H  U^+  = -H,   U^2 = 1
// cs_sls_comm records whether the chiral and sublattice unitaries commute (+1)
// or anticommute (-1) when both are present.
//
// ASCII naming: a dagger is spelled "dag" (CIIdag), sublattice decorations keep
// their subscripts ("BDI+S-+"). The pretty() helper restores the dagger glyph.

#include "common.hpp"

#include <json.hpp>

#include <array>
#include <optional>

namespace andloc::symmetry {

enum class EnergyKind { Generic, Real, Imaginary, Zero };

inline const char* to_string(EnergyKind k) {
    switch (k) {
        case EnergyKind::Generic: return "generic";
        case EnergyKind::Real: return "real";
        case EnergyKind::Imaginary: return "imaginary";
        case EnergyKind::Zero: return "zero";
    }
    return "?";
}

inline EnergyKind energy_kind_from_string(const std::string& s) {
    if (s == "generic" || s == "generic-complex") return EnergyKind::Generic;
    if (s == "real") return EnergyKind::Real;
    if (s == "imaginary") return EnergyKind::Imaginary;
    if (s == "zero") return EnergyKind::Zero;
    throw std::invalid_argument("unknown energy kind: " + s);
}

// Kind of a concrete reference energy.
inline EnergyKind kind_of_energy(cplx e, double tol = 1e-12) {
    double scale = std::max(1.0, std::abs(e));
    bool re0 = std::abs(e.real()) <= tol * scale;
    bool im0 = std::abs(e.imag()) <= tol * scale;
    if (re0 && im0) return EnergyKind::Zero;
    if (im0) return EnergyKind::Real;
    if (re0) return EnergyKind::Imaginary;
    return EnergyKind::Generic;
}

// True when probing at an energy of kind `probe` keeps every symmetry of a
// class whose conserving kind is `conserving`.
inline bool energy_kind_within(EnergyKind probe, EnergyKind conserving) {
    if (conserving == EnergyKind::Generic) return true;
    if (probe == EnergyKind::Zero) return true;
    return probe == conserving;
}

// Dimension constraint on the Hermitian input of the matching construction.
enum class DimRule { Any, Even, Mult4 };

inline const char* to_string(DimRule r) {
    switch (r) {
        case DimRule::Any: return "any";
        case DimRule::Even: return "even";
        case DimRule::Mult4: return "multiple-of-4";
    }
    return "?";
}

struct ClassRecord {
    const char* name;
    int trs;        // T+ sign, 0 if absent
    int phs;        // P- sign
    int trs_dag;    // P+ sign
    int phs_dag;    // T- sign
    bool cs;
    bool sls;
    int cs_sls_comm;  // +1 / -1 when cs && sls, else 0
    const char* hermitian_class;
    EnergyKind energy;
    DimRule dim_rule;  // for the Hermitian -> non-Hermitian construction
};

// All 38 classes. N counts the antiunitary symmetries.
inline const std::array<ClassRecord, 38>& class_table() {
    using EK = EnergyKind;
    using DR = DimRule;
    static const std::array<ClassRecord, 38> t = {{
        // N = 0
        {"A", 0, 0, 0, 0, false, false, 0, "AIII", EK::Generic, DR::Even},
        {"AIII", 0, 0, 0, 0, true, false, 0, "A", EK::Imaginary, DR::Any},
        {"AIIIdag", 0, 0, 0, 0, false, true, 0, "AIII", EK::Zero, DR::Even},
        {"AIII+S+", 0, 0, 0, 0, true, true, +1, "AIII", EK::Zero, DR::Even},
        {"AIII+S-", 0, 0, 0, 0, true, true, -1, "A", EK::Zero, DR::Any},
        // N = 1
        {"AI", 1, 0, 0, 0, false, false, 0, "BDI", EK::Real, DR::Even},
        {"AII", -1, 0, 0, 0, false, false, 0, "CII", EK::Real, DR::Mult4},
        {"D", 0, 1, 0, 0, false, false, 0, "DIII", EK::Zero, DR::Even},
        {"C", 0, -1, 0, 0, false, false, 0, "CI", EK::Zero, DR::Mult4},
        {"AIdag", 0, 0, 1, 0, false, false, 0, "CI", EK::Generic, DR::Even},
        {"AIIdag", 0, 0, -1, 0, false, false, 0, "DIII", EK::Generic, DR::Mult4},
        // N = 2, chiral families
        {"BDI", 1, 1, 0, 0, true, false, 0, "D", EK::Zero, DR::Any},
        {"CI", 1, -1, 0, 0, true, false, 0, "AI", EK::Zero, DR::Even},
        {"DIII", -1, 1, 0, 0, true, false, 0, "AII", EK::Zero, DR::Even},
        {"CII", -1, -1, 0, 0, true, false, 0, "C", EK::Zero, DR::Even},
        {"BDIdag", 0, 0, 1, 1, true, false, 0, "AI", EK::Imaginary, DR::Any},
        {"CIdag", 0, 0, 1, -1, true, false, 0, "C", EK::Imaginary, DR::Even},
        {"DIIIdag", 0, 0, -1, 1, true, false, 0, "D", EK::Imaginary, DR::Even},
        {"CIIdag", 0, 0, -1, -1, true, false, 0, "AII", EK::Imaginary, DR::Even},
        // N = 2, sublattice decorations
        {"D+S+", 0, 1, 1, 0, false, true, 0, "AIII", EK::Zero, DR::Even},
        {"C+S-", 0, -1, 1, 0, false, true, 0, "CI", EK::Zero, DR::Even},
        {"D+S-", 0, 1, -1, 0, false, true, 0, "DIII", EK::Zero, DR::Even},
        {"C+S+", 0, -1, -1, 0, false, true, 0, "AIII", EK::Zero, DR::Mult4},
        {"AI+S+", 1, 0, 0, 1, false, true, 0, "BDI", EK::Zero, DR::Even},
        {"AI+S-", 1, 0, 0, -1, false, true, 0, "AIII", EK::Zero, DR::Even},
        {"AII+S+", -1, 0, 0, -1, false, true, 0, "CII", EK::Zero, DR::Mult4},
        // N = 3
        {"BDI+S++", 1, 1, 1, 1, true, true, +1, "BDI", EK::Zero, DR::Even},
        {"BDI+S--", 1, 1, -1, -1, true, true, +1, "DIII", EK::Zero, DR::Even},
        {"DIII+S++", -1, 1, 1, -1, true, true, +1, "CII", EK::Zero, DR::Mult4},
        {"CI+S++", 1, -1, -1, 1, true, true, +1, "BDI", EK::Zero, DR::Mult4},
        {"CI+S--", 1, -1, 1, -1, true, true, +1, "CI", EK::Zero, DR::Mult4},
        {"CII+S++", -1, -1, -1, -1, true, true, +1, "CII", EK::Zero, DR::Mult4},
        {"BDI+S+-", 1, 1, -1, 1, true, true, -1, "D", EK::Zero, DR::Any},
        {"BDI+S-+", 1, 1, 1, -1, true, true, -1, "A", EK::Zero, DR::Any},
        {"DIII+S+-", -1, 1, -1, -1, true, true, -1, "AII", EK::Zero, DR::Even},
        {"CI+S+-", 1, -1, 1, 1, true, true, -1, "AI", EK::Zero, DR::Any},
        {"CI+S-+", 1, -1, -1, -1, true, true, -1, "A", EK::Zero, DR::Even},
        {"CII+S+-", -1, -1, 1, -1, true, true, -1, "C", EK::Zero, DR::Even},
    }};
    return t;
}

inline std::string normalize_class_name(std::string s) {
    // Accept the dagger glyph and a few spellings seen in the wild.
    std::string out;
    for (size_t i = 0; i < s.size();) {
        if (s.compare(i, 3, "†") == 0) {
            out += "dag";
            i += 3;
        } else if (s[i] == ' ' || s[i] == '_') {
            ++i;
        } else {
            out += s[i];
            ++i;
        }
    }
    return out;
}

inline std::string pretty_class_name(const std::string& name) {
    std::string out = name;
    auto pos = out.find("dag");
    if (pos != std::string::npos) out.replace(pos, 3, "†");
    return out;
}

inline const ClassRecord* find_class(const std::string& raw_name) {
    std::string name = normalize_class_name(raw_name);
    for (const auto& r : class_table())
        if (name == r.name) return &r;
    return nullptr;
}

inline const ClassRecord& class_record(const std::string& name) {
    const ClassRecord* r = find_class(name);
    if (!r) throw std::invalid_argument("unknown symmetry class: " + name);
    return *r;
}

// Signature lookup: signs of the four antiunitaries plus the unitary flags.
inline const ClassRecord* find_by_signature(int trs, int phs, int trs_dag, int phs_dag, bool cs,
                                            bool sls, int comm) {
    for (const auto& r : class_table()) {
        if (r.trs == trs && r.phs == phs && r.trs_dag == trs_dag && r.phs_dag == phs_dag &&
            r.cs == cs && r.sls == sls && (!(cs && sls) || r.cs_sls_comm == comm))
            return &r;
    }
    return nullptr;
}

// Class surviving at a reference energy of the given kind. Symmetries that
// relate the spectrum at E to a different energy are dropped; the remaining
// set is completed under composition and, when it only matches the table up
// to the H -> iH relabeling (TRS <-> PHS-dagger at equal sign), normalized
// through that dictionary.
inline const ClassRecord& reduce_class(const ClassRecord& rec, EnergyKind probe) {
    if (energy_kind_within(probe, rec.energy)) return rec;

    bool keep_real = (probe == EnergyKind::Real || probe == EnergyKind::Zero);
    bool keep_imag = (probe == EnergyKind::Imaginary || probe == EnergyKind::Zero);
    bool keep_zero = (probe == EnergyKind::Zero);

    int trs = keep_real ? rec.trs : 0;
    int phs = keep_zero ? rec.phs : 0;
    int trs_dag = rec.trs_dag;  // transpose alone never moves the spectrum
    int phs_dag = keep_imag ? rec.phs_dag : 0;
    bool cs = rec.cs && keep_imag;
    bool sls = rec.sls && keep_zero;

    // Compose surviving antiunitaries into unitary symmetries.
    if ((trs && phs) || (trs_dag && phs_dag)) cs = true;
    if ((trs && phs_dag) || (trs_dag && phs)) sls = true;

    // H -> iH dictionary for sets the table spells differently.
    if (trs && trs_dag && !phs_dag) {
        phs_dag = trs;
        trs = 0;
        cs = true;
    }
    if (phs_dag && !trs_dag && !cs && !trs && !phs) {
        trs = phs_dag;
        phs_dag = 0;
    }

    const ClassRecord* out = find_by_signature(trs, phs, trs_dag, phs_dag, cs, sls, 0);
    if (!out)
        throw std::logic_error(std::string("no class matches the reduced symmetry set of ") +
                               rec.name);
    return *out;
}

inline const ClassRecord& reduce_class(const std::string& name, cplx energy) {
    return reduce_class(class_record(name), kind_of_energy(energy));
}

// Hermitization target of a class probed at an energy of the given kind:
// the reduced class record; its hermitian_class field names the result.
inline const ClassRecord& counterpart(const ClassRecord& rec, EnergyKind probe) {
    return reduce_class(rec, probe);
}

inline const ClassRecord& counterpart(const std::string& name, cplx energy) {
    return reduce_class(class_record(name), kind_of_energy(energy));
}

// Machine-readable export of the whole table.
inline nlohmann::json class_db_json() {
    nlohmann::json classes = nlohmann::json::array();
    for (const auto& r : class_table()) {
        nlohmann::json row;
        row["name"] = r.name;
        row["trs"] = r.trs;
        row["phs"] = r.phs;
        row["trs_dag"] = r.trs_dag;
        row["phs_dag"] = r.phs_dag;
        row["cs"] = r.cs;
        row["sls"] = r.sls;
        if (r.cs && r.sls)
            row["cs_sls_commute"] = (r.cs_sls_comm > 0 ? "+" : "-");
        else
            row["cs_sls_commute"] = nullptr;
        row["hermitian_class"] = r.hermitian_class;
        row["conserving_energy"] = to_string(r.energy);
        row["hermitian_dim"] = to_string(r.dim_rule);
        classes.push_back(row);
    }
    return nlohmann::json{{"classes", classes}};
}

}  // namespace andloc::symmetry
