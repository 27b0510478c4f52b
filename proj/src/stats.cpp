#include "selfrep/stats.hpp"

#include <algorithm>
#include <cmath>

namespace selfrep {

void SampleSet::validate() const {
    if (values.empty()) throw StatsError("sample set '" + label + "' is empty");
    for (double v : values)
        if (!std::isfinite(v)) throw StatsError("sample set '" + label + "' has a non-finite value");
}

nlohmann::json to_json(const StatReport& r) {
    return {{"test", r.test},   {"statistic", r.statistic}, {"critical", r.critical},    {"alpha", r.alpha},
            {"m", r.m},         {"n", r.n},                 {"pass", r.pass},            {"diagnostic", r.diagnostic},
            {"parameters", r.parameters}};
}

StatReport report_from_json(const nlohmann::json& j) {
    StatReport r;
    r.test = j.at("test").get<std::string>();
    r.statistic = j.at("statistic").get<double>();
    r.critical = j.at("critical").get<double>();
    r.alpha = j.at("alpha").get<double>();
    r.m = j.at("m").get<std::size_t>();
    r.n = j.at("n").get<std::size_t>();
    r.pass = j.at("pass").get<bool>();
    r.diagnostic = j.value("diagnostic", false);
    r.parameters = j.value("parameters", nlohmann::json::object());
    return r;
}

double ks_constant(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw StatsError("alpha must lie in (0, 1)");
    return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double m = static_cast<double>(a.size()), n = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / m - static_cast<double>(j) / n));
    }
    return d;
}

StatReport ks_two_sample(const SampleSet& a, const SampleSet& b, double alpha) {
    a.validate();
    b.validate();
    if (a.values.size() < 50 || b.values.size() < 50)
        throw StatsError("ks_two_sample: need at least 50 values per side (" + a.label + ", " + b.label + ")");
    StatReport r;
    r.test = "ks:" + a.label + "|" + b.label;
    r.m = a.values.size();
    r.n = b.values.size();
    r.alpha = alpha;
    r.statistic = ks_distance(a.values, b.values);
    const double m = static_cast<double>(r.m), n = static_cast<double>(r.n);
    r.critical = ks_constant(alpha) * std::sqrt((m + n) / (m * n));
    r.pass = r.statistic < r.critical;
    r.parameters = {{"a", {{"label", a.label}, {"seeds", {a.seed_first, a.seed_last}}, {"parameters", a.parameters}}},
                    {"b", {{"label", b.label}, {"seeds", {b.seed_first, b.seed_last}}, {"parameters", b.parameters}}}};
    return r;
}

StatReport ks_one_sample(const SampleSet& a, const std::function<double(double)>& cdf, double alpha) {
    a.validate();
    if (a.values.size() < 50) throw StatsError("ks_one_sample: need at least 50 values");
    std::vector<double> v = a.values;
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double f = cdf(v[i]);
        d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
    }
    StatReport r;
    r.test = "ks1:" + a.label;
    r.m = v.size();
    r.alpha = alpha;
    r.statistic = d;
    r.critical = ks_constant(alpha) / std::sqrt(n);
    r.pass = r.statistic < r.critical;
    r.parameters = {{"label", a.label}, {"seeds", {a.seed_first, a.seed_last}}, {"parameters", a.parameters}};
    return r;
}

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    if (v.empty()) return out;
    double s = 0.0;
    for (double x : v) s += x;
    out.mean = s / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    double q = 0.0;
    for (double x : v) q += (x - out.mean) * (x - out.mean);
    out.variance = q / static_cast<double>(v.size() - 1);
    out.se = std::sqrt(out.variance / static_cast<double>(v.size()));
    return out;
}

StatReport mean_test(const std::string& name, const std::vector<double>& v, double expected, double k) {
    const MeanSe ms = mean_se(v);
    StatReport r;
    r.test = name;
    r.m = v.size();
    r.critical = k;
    r.statistic = ms.se > 0.0 ? std::abs(ms.mean - expected) / ms.se : (ms.mean == expected ? 0.0 : INFINITY);
    r.pass = r.statistic < r.critical || (ms.se == 0.0 && ms.mean == expected);
    r.parameters = {{"mean", ms.mean}, {"se", ms.se}, {"expected", expected}};
    return r;
}

StatReport relative_test(const std::string& name, double estimate, double expected, double tolerance) {
    StatReport r;
    r.test = name;
    r.critical = tolerance;
    r.statistic = std::abs(estimate / expected - 1.0);
    r.pass = r.statistic < r.critical;
    r.parameters = {{"estimate", estimate}, {"expected", expected}};
    return r;
}

StatReport rate_test(const std::string& name, std::size_t count, std::size_t total, double bound) {
    StatReport r;
    r.test = name;
    r.m = total;
    r.critical = bound;
    r.statistic = total > 0 ? static_cast<double>(count) / static_cast<double>(total) : 0.0;
    r.pass = r.statistic < r.critical;
    r.parameters = {{"count", count}, {"total", total}};
    return r;
}

bool all_pass(const std::vector<StatReport>& reports) {
    return std::all_of(reports.begin(), reports.end(), [](const StatReport& r) { return r.diagnostic || r.pass; });
}

StatReport nonincreasing_test(const std::string& name, const std::vector<double>& seq, double tol) {
    StatReport r;
    r.test = name;
    r.m = seq.size();
    r.critical = tol;
    double up = -INFINITY;
    for (std::size_t i = 1; i < seq.size(); ++i) up = std::max(up, seq[i] - seq[i - 1]);
    r.statistic = seq.size() < 2 ? 0.0 : up;
    r.pass = r.statistic < r.critical;
    r.parameters = {{"sequence", seq}};
    return r;
}

}  // namespace selfrep
