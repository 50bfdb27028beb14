#include "harmonic/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace harmonic {

std::string format_double(double v)
{
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void dump_value(const nlohmann::json& j, int indent, int depth, std::string& out)
{
    const std::string pad = indent > 0 ? std::string(static_cast<std::size_t>(indent * (depth + 1)), ' ') : "";
    const std::string close = indent > 0 ? std::string(static_cast<std::size_t>(indent * depth), ' ') : "";
    const char* nl = indent > 0 ? "\n" : "";
    switch (j.type()) {
    case nlohmann::json::value_t::number_float: {
        const double v = j.get<double>();
        out += std::isfinite(v) ? format_double(v) : "null";
        break;
    }
    case nlohmann::json::value_t::object: {
        if (j.empty()) {
            out += "{}";
            break;
        }
        out += "{";
        out += nl;
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!first) {
                out += ",";
                out += nl;
            }
            first = false;
            out += pad + nlohmann::json(it.key()).dump() + (indent > 0 ? ": " : ":");
            dump_value(it.value(), indent, depth + 1, out);
        }
        out += nl + close + "}";
        break;
    }
    case nlohmann::json::value_t::array: {
        if (j.empty()) {
            out += "[]";
            break;
        }
        out += "[";
        out += nl;
        for (std::size_t i = 0; i < j.size(); ++i) {
            if (i) {
                out += ",";
                out += nl;
            }
            out += pad;
            dump_value(j[i], indent, depth + 1, out);
        }
        out += nl + close + "]";
        break;
    }
    default:
        out += j.dump();
    }
}

}  // namespace

std::string dump_json(const nlohmann::json& j, int indent)
{
    std::string out;
    dump_value(j, indent, 0, out);
    out += "\n";
    return out;
}

void CsvTable::add_row(std::vector<std::string> row)
{
    if (row.size() != columns.size()) throw std::logic_error("CSV row width does not match the header");
    rows.push_back(std::move(row));
}

std::string CsvTable::str() const
{
    std::ostringstream os;
    os << "# " << schema << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << "\n";
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
        os << "\n";
    }
    return os.str();
}

std::string join_cell(const std::vector<int>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + std::to_string(v[i]);
    return out;
}

std::string join_cell(const std::vector<double>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + format_double(v[i]);
    return out;
}

// ---------------------------------------------------------------------------

MomentReport build_moment_report(const std::vector<FactorialIndex>& xi_list, const ModelParams& p, bool rational)
{
    p.validate();
    if (rational && !p.has_rational_spin()) throw std::domain_error("rational mode needs 2s to be an integer");
    MomentReport r;
    r.params = p;
    r.exact = rational;
    r.current = current(p);
    for (const auto& xi : xi_list) {
        if (xi.size() != p.N) throw std::domain_error("xi length must equal N");
        MomentEntry e;
        e.xi = xi;
        if (rational) {
            const auto g = g_occupation_all<Rational>(xi, spin_rational(p));
            for (const auto& v : g) e.g.push_back(to_double(v));
            for (const auto& v : absorption_probs_exact(xi, p)) e.p.push_back(to_double(v));
            const Rational G = factorial_moment_exact(xi, p);
            e.G = to_double(G);
            e.G_exact = G.get_str();
        } else {
            e.g = g_occupation_all<double>(xi, p.s);
            e.p = absorption_probs(xi, p).probs;
            e.G = factorial_moment(xi, p);
        }
        const auto x = xi.positions();
        switch (x.size()) {
        case 1:
            e.cumulant_kind = "mean";
            e.cumulant = mean_profile(x[0], p);
            break;
        case 2:
            e.cumulant_kind = x[0] == x[1] ? "variance" : "covariance";
            e.cumulant = x[0] == x[1] ? variance(x[0], p) : covariance(x[0], x[1], p);
            break;
        case 3:
            if (x[0] == x[1] || x[1] == x[2]) break;
            e.cumulant_kind = "kappa3";
            e.cumulant = third_cumulant(x[0], x[1], x[2], p);
            break;
        default:
            break;
        }
        r.entries.push_back(std::move(e));
    }
    return r;
}

nlohmann::json to_json(const MomentReport& r)
{
    nlohmann::json j;
    j["schema"] = kMomentsSchema;
    j["params"] = r.params;
    j["exact"] = r.exact;
    j["current"] = r.current;
    j["entries"] = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json row;
        row["xi"] = e.xi.xi;
        row["positions"] = e.xi.positions();
        row["G"] = e.G;
        if (e.G_exact) row["G_exact"] = *e.G_exact;
        row["g"] = e.g;
        row["p"] = e.p;
        if (!e.cumulant_kind.empty()) row["cumulant"] = {{"kind", e.cumulant_kind}, {"value", e.cumulant}};
        j["entries"].push_back(row);
    }
    return j;
}

CsvTable to_csv(const MomentReport& r)
{
    CsvTable t{kMomentsSchema, {"xi", "positions", "G", "G_exact", "g", "p", "cumulant_kind", "cumulant"}, {}};
    for (const auto& e : r.entries)
        t.add_row({join_cell(e.xi.xi), join_cell(e.xi.positions()), format_double(e.G), e.G_exact.value_or(""),
                   join_cell(e.g), join_cell(e.p), e.cumulant_kind,
                   e.cumulant_kind.empty() ? "" : format_double(e.cumulant)});
    return t;
}

}  // namespace harmonic
