#pragma once

// Serialization: moment reports, versioned CSV tables and JSON with 17
// significant digits.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmonic/exact.hpp"
#include "harmonic/model.hpp"

namespace harmonic {

/// printf("%.17g"); non-finite values print as nan/inf.
std::string format_double(double v);

/// JSON text with every floating-point number printed by format_double.
std::string dump_json(const nlohmann::json& j, int indent = 2);

/// A CSV table whose first line is "# <schema>".
struct CsvTable {
    std::string schema;
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    void add_row(std::vector<std::string> row);
    std::string str() const;
};

/// Semicolon-joined list for a single CSV cell.
std::string join_cell(const std::vector<int>& v);
std::string join_cell(const std::vector<double>& v);

struct MomentEntry {
    FactorialIndex xi;
    std::vector<double> g;        // g_xi(n), n = 0..|xi|
    std::vector<double> p;        // p_xi(k), k = 0..|xi|
    double G = 0.0;
    std::optional<std::string> G_exact;  // "num/den" in rational mode
    std::string cumulant_kind;    // mean, variance, covariance, kappa3 or empty
    double cumulant = 0.0;
};

struct MomentReport {
    ModelParams params;
    bool exact = false;
    std::vector<MomentEntry> entries;
    double current = 0.0;
};

/// Rational mode requires 2s to be integral.
MomentReport build_moment_report(const std::vector<FactorialIndex>& xi_list, const ModelParams& p,
                                 bool rational);

nlohmann::json to_json(const MomentReport& r);
CsvTable to_csv(const MomentReport& r);

inline constexpr const char* kMomentsSchema = "harmonic-moments v1";
inline constexpr const char* kAbsorbSchema = "harmonic-absorb v1";
inline constexpr const char* kMeasureSchema = "harmonic-measure v1";
inline constexpr const char* kSimulateSchema = "harmonic-simulate v1";
inline constexpr const char* kScalingSchema = "harmonic-scaling v1";

}  // namespace harmonic
