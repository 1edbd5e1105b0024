#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "czkit/io.hpp"

namespace czkit {

struct CorpusEntry {
    std::string id;
    DiscreteMeasure mu;
};

// Every *.json measure directly inside dir, sorted by file name.
std::vector<CorpusEntry> load_corpus(const std::string& dir);

std::uint64_t seed_from(const std::string& s);

// Mean-zero test functions: random, logarithmic spike, two-sided step, cosine.
std::vector<SampledFunction> test_functions(const DiscreteMeasure& mu, int count, std::uint64_t seed);

// Frozen thresholds; a run passes when achieved <= tolerance * frozen
// (or >= frozen / tolerance for lower bounds).
struct Calibration {
    double tolerance = 1.05;
    std::map<std::string, double> frozen;
    bool calibrating = false;

    static Calibration load(const std::string& path);
    void save(const std::string& path) const;
    bool has(const std::string& k) const { return frozen.count(k) > 0; }
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = true;
    std::vector<std::string> notes;
    std::map<std::string, double> achieved;  // values that calibration freezes
    double seconds = 0.0;
};

struct SuiteCache;

class SuiteRunner {
public:
    SuiteRunner(std::vector<CorpusEntry> corpus, Calibration cal);
    ~SuiteRunner();

    CriterionResult run(int id);
    ConstantsLedger& ledger() { return ledger_; }
    const Calibration& calibration() const { return cal_; }

private:
    CriterionResult delta_algebra();
    CriterionResult doubling_search();
    CriterionResult maximal_sandwich();
    CriterionResult easy_implication();
    CriterionResult maxi_sandwich();
    CriterionResult cz_decomposition();
    CriterionResult whitney_besicovich();
    CriterionResult john_nirenberg();
    CriterionResult main_lemma();
    CriterionResult kernel_suite();

    // achieved <= tol * frozen; records the value for calibration.
    bool at_most(CriterionResult& r, const std::string& key, double achieved);
    bool at_least(CriterionResult& r, const std::string& key, double achieved);

    std::vector<CorpusEntry> corpus_;
    Calibration cal_;
    ConstantsLedger ledger_;
    std::unique_ptr<SuiteCache> cache_;
};

// Criteria exercised by a named suite: cubes, maximal, covering, spaces, czd,
// mainlemma, kernels, all.
std::vector<int> suite_criteria(const std::string& suite);

std::string criterion_name(int id);

}  // namespace czkit
