#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace selfrep {

class StatsError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SampleSet {
    std::string label;
    std::vector<double> values;
    std::uint64_t seed_first = 0;
    std::uint64_t seed_last = 0;
    nlohmann::json parameters = nlohmann::json::object();

    void validate() const;
};

struct StatReport {
    std::string test;
    double statistic = 0.0;
    double critical = 0.0;
    double alpha = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
    bool pass = false;
    bool diagnostic = false;  // reported, not part of the verdict
    nlohmann::json parameters = nlohmann::json::object();
};

nlohmann::json to_json(const StatReport& r);
StatReport report_from_json(const nlohmann::json& j);

// Asymptotic Kolmogorov constant c(alpha) = sqrt(-ln(alpha / 2) / 2).
double ks_constant(double alpha);

// Sup distance between two empirical CDFs.
double ks_distance(std::vector<double> a, std::vector<double> b);

// Needs at least 50 values per side; pass iff statistic < c(alpha) sqrt((m+n)/(mn)).
StatReport ks_two_sample(const SampleSet& a, const SampleSet& b, double alpha);

// One-sample KS against a continuous CDF; critical value c(alpha) / sqrt(n).
StatReport ks_one_sample(const SampleSet& a, const std::function<double(double)>& cdf, double alpha);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
    double variance = 0.0;  // unbiased
};

MeanSe mean_se(const std::vector<double>& v);

// |mean - expected| / se against k standard errors.
StatReport mean_test(const std::string& name, const std::vector<double>& v, double expected, double k = 3.0);

// |estimate / expected - 1| against a relative tolerance.
StatReport relative_test(const std::string& name, double estimate, double expected, double tolerance);

// pass iff count / total < bound
StatReport rate_test(const std::string& name, std::size_t count, std::size_t total, double bound);

inline double bonferroni(double alpha, std::size_t k) { return k == 0 ? alpha : alpha / static_cast<double>(k); }

// Verdict over the non-diagnostic reports.
bool all_pass(const std::vector<StatReport>& reports);

// pass iff the largest step up along the sequence is below tol
StatReport nonincreasing_test(const std::string& name, const std::vector<double>& seq, double tol = 1e-12);

}  // namespace selfrep
