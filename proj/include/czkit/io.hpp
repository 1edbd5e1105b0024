#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "czkit/czdecomp.hpp"
#include "czkit/mainlemma.hpp"

namespace czkit {

using json = nlohmann::json;

json read_json(const std::string& path);
void write_json(const std::string& path, const json& j);

json measure_to_json(const DiscreteMeasure& mu);
// Throws SchemaError on malformed content (NaN/Inf, nonpositive weights, duplicates).
DiscreteMeasure measure_from_json(const json& j);
DiscreteMeasure load_measure(const std::string& path);
void save_measure(const DiscreteMeasure& mu, const std::string& path);

SampledFunction function_from_json(const json& j, std::size_t expected);
SampledFunction load_function(const std::string& path, std::size_t expected);
void save_function(const SampledFunction& f, const std::string& path);

json cube_to_json(const Cube& q);
Cube cube_from_json(const json& j);

json generation_to_json(const Generation& g);
json cz_to_json(const CZDecomposition& dec);
json main_to_json(const MainDecomposition& dec, const std::vector<Check>& claims, const std::vector<Check>& kernels);
json checks_to_json(const std::vector<Check>& checks);

// Overrides applied on top of `base`; keys: A, alpha1, alpha2, alpha3, sigma, eps1, eps3, cap_const, enforce_chain.
MainParams params_from_json(const json& j, MainParams base);
json params_to_json(const MainParams& p);

struct LedgerEntry {
    double value = 0.0;
    std::string measure;
    std::string operation;
    std::string location;
};

class ConstantsLedger {
public:
    void record(const std::string& tag, double value, const std::string& measure, const std::string& operation,
                const std::string& location = {});
    // Keeps the largest value seen for each tag.
    void record_max(const std::string& tag, double value, const std::string& measure, const std::string& operation,
                    const std::string& location = {});
    const std::map<std::string, LedgerEntry>& entries() const { return entries_; }
    bool has(const std::string& tag) const { return entries_.count(tag) > 0; }
    double value(const std::string& tag) const { return entries_.at(tag).value; }
    json to_json() const;

private:
    std::map<std::string, LedgerEntry> entries_;
};

// Rows written with 17 significant digits.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

}  // namespace czkit
