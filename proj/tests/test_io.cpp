#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "selfrep/io.hpp"

using namespace selfrep;

namespace {

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_CASE("walk paths survive a binary round trip bit for bit") {
    StopRule rule;
    rule.at_time = 2.0;
    const LatticeWalkPath p = sample_walk(5, -3, rule, 12);
    std::stringstream ss;
    write_path_binary(ss, p);
    const LatticeWalkPath q = read_path_binary(ss);
    CHECK(q.level == p.level);
    CHECK(q.start_site == p.start_site);
    CHECK(q.seed == p.seed);
    CHECK(q.sites == p.sites);
    CHECK(std::memcmp(q.times.data(), p.times.data(), p.times.size() * sizeof(double)) == 0);
    CHECK(std::memcmp(q.holding_clock.data(), p.holding_clock.data(), p.holding_clock.size() * sizeof(double)) == 0);
    CHECK(q.total_time == p.total_time);
    CHECK(q.reason == p.reason);
    // the encoding is smaller than raw storage
    CHECK(ss.str().size() < p.sites.size() * 24);
}

TEST_CASE("fields survive a binary round trip") {
    const ScalarField f = sample_gff(1.3, 3, 5.0, 2);
    std::stringstream ss;
    write_field_binary(ss, f);
    const ScalarField g = read_field_binary(ss);
    CHECK(g.level == f.level);
    CHECK(g.min_site == f.min_site);
    CHECK(g.values == f.values);
}

TEST_CASE("corrupt binary input is rejected") {
    std::stringstream bad("XXXX garbage");
    CHECK_THROWS_AS(read_path_binary(bad), FormatError);
    const ScalarField f = sample_gff(1.0, 2, 3.0, 2);
    std::stringstream ss;
    write_field_binary(ss, f);
    std::string s = ss.str();
    std::stringstream cut(s.substr(0, s.size() / 2));
    CHECK_THROWS_AS(read_field_binary(cut), FormatError);
    std::stringstream wrong(s);
    CHECK_THROWS_AS(read_path_binary(wrong), FormatError);
}

TEST_CASE("CSV writers") {
    StopRule rule;
    rule.after_jumps = 10;
    const LatticeWalkPath p = sample_walk(2, 0, rule, 1);
    std::ostringstream a;
    write_path_csv(a, p);
    CHECK(first_line(a.str()) == "time,site");
    CHECK(count_lines(a.str()) == p.sites.size() + 1);

    const ScalarField f = sample_gff(1.0, 1, 2.0, 1);
    std::ostringstream b;
    write_field_csv(b, f);
    CHECK(first_line(b.str()) == "site,x,value");
    CHECK(count_lines(b.str()) == f.values.size() + 1);

    std::vector<SampleSet> sets{{"x", {0.1, 1.0 / 3.0}}, {"y", {2.5}}};
    std::ostringstream c;
    write_samples_csv(c, sets);
    std::istringstream in(c.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,index,value");
    std::getline(in, line);
    std::getline(in, line);
    // values are written with round-trip precision
    CHECK(std::stod(line.substr(line.rfind(',') + 1)) == 1.0 / 3.0);
}

TEST_CASE("JSON files") {
    const auto dir = std::filesystem::temp_directory_path() / "selfrep_io_test" / "nested";
    std::filesystem::remove_all(dir.parent_path());
    const nlohmann::json j = {{"a", 0.1}, {"b", {1, 2, 3}}, {"c", "text"}};
    write_json_file(dir / "x.json", j);
    CHECK(read_json_file(dir / "x.json") == j);
    CHECK_THROWS(read_json_file(dir / "missing.json"));
    std::filesystem::remove_all(dir.parent_path());
}
