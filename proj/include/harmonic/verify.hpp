#pragma once

// Identity suite behind `harmonic verify`: closed forms against oracles and
// the operator identities on truncated Fock spaces.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "harmonic/model.hpp"

namespace harmonic {

struct VerifyOptions {
    std::optional<std::string> only;  // run one family
    bool rational = false;            // exact comparisons where 2s is an integer
    ModelParams params{2, 0.5, 0.5, 0.2};
    int cutoff = 8;                   // per-site Fock cutoff M
    std::uint64_t seed = 1;           // random (m, xi) pairs of the duality family
};

struct VerifyRecord {
    std::string family;
    std::string check_name;
    nlohmann::json parameters;
    double residual = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool exact = false;
};

/// Family names in execution order.
const std::vector<std::string>& verify_families();

/// Throws std::invalid_argument for an unknown family.
std::vector<VerifyRecord> run_verification(const VerifyOptions& opt);

nlohmann::json to_json(const std::vector<VerifyRecord>& records);

}  // namespace harmonic
