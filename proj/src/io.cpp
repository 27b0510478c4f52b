#include "selfrep/io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace selfrep {

namespace {

constexpr char kPathMagic[4] = {'S', 'R', 'P', 'W'};
constexpr char kFieldMagic[4] = {'S', 'R', 'P', 'F'};
constexpr std::uint8_t kVersion = 1;

void put_varint(std::ostream& os, std::uint64_t v) {
    while (v >= 0x80) {
        os.put(static_cast<char>((v & 0x7F) | 0x80));
        v >>= 7;
    }
    os.put(static_cast<char>(v));
}

std::uint64_t get_varint(std::istream& is) {
    std::uint64_t v = 0;
    for (int shift = 0; shift < 64; shift += 7) {
        const int c = is.get();
        if (c == std::char_traits<char>::eof()) throw FormatError("truncated varint");
        v |= static_cast<std::uint64_t>(c & 0x7F) << shift;
        if (!(c & 0x80)) return v;
    }
    throw FormatError("overlong varint");
}

std::uint64_t zigzag(std::int64_t v) { return (static_cast<std::uint64_t>(v) << 1) ^ static_cast<std::uint64_t>(v >> 63); }
std::int64_t unzigzag(std::uint64_t v) { return static_cast<std::int64_t>(v >> 1) ^ -static_cast<std::int64_t>(v & 1); }

// XOR of consecutive bit patterns, byte-swapped so that the shared sign and
// exponent bits end up low and vanish from the varint.
struct RealCoder {
    std::uint64_t prev = 0;
    void put(std::ostream& os, double x) {
        const auto b = std::bit_cast<std::uint64_t>(x);
        put_varint(os, __builtin_bswap64(b ^ prev));
        prev = b;
    }
    double get(std::istream& is) {
        prev ^= __builtin_bswap64(get_varint(is));
        return std::bit_cast<double>(prev);
    }
};

template <class T>
void put_raw(std::ostream& os, T v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get_raw(std::istream& is) {
    T v;
    if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("truncated header");
    return v;
}

void expect_magic(std::istream& is, const char (&magic)[4]) {
    char m[4];
    if (!is.read(m, 4) || std::memcmp(m, magic, 4) != 0) throw FormatError("bad magic");
    if (get_raw<std::uint8_t>(is) != kVersion) throw FormatError("unsupported version");
}

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

}  // namespace

void write_path_binary(std::ostream& os, const LatticeWalkPath& p) {
    os.write(kPathMagic, 4);
    put_raw<std::uint8_t>(os, kVersion);
    put_raw<std::int32_t>(os, p.level);
    put_raw<std::int64_t>(os, p.start_site);
    put_raw<std::uint64_t>(os, p.seed);
    put_raw<std::uint64_t>(os, p.sites.size());
    put_raw<double>(os, p.total_time);
    put_raw<std::uint8_t>(os, p.truncated);
    put_raw<std::uint8_t>(os, static_cast<std::uint8_t>(p.reason));
    std::int64_t prev = p.start_site;
    RealCoder tc, hc;
    for (std::size_t i = 0; i < p.sites.size(); ++i) {
        put_varint(os, zigzag(p.sites[i] - prev));
        prev = p.sites[i];
        tc.put(os, p.times[i]);
        hc.put(os, p.holding_clock[i]);
    }
}

LatticeWalkPath read_path_binary(std::istream& is) {
    expect_magic(is, kPathMagic);
    LatticeWalkPath p;
    p.level = get_raw<std::int32_t>(is);
    p.start_site = get_raw<std::int64_t>(is);
    p.seed = get_raw<std::uint64_t>(is);
    const auto n = get_raw<std::uint64_t>(is);
    p.total_time = get_raw<double>(is);
    p.truncated = get_raw<std::uint8_t>(is) != 0;
    p.reason = static_cast<StopReason>(get_raw<std::uint8_t>(is));
    std::int64_t prev = p.start_site;
    RealCoder tc, hc;
    for (std::uint64_t i = 0; i < n; ++i) {
        prev += unzigzag(get_varint(is));
        p.sites.push_back(prev);
        p.times.push_back(tc.get(is));
        p.holding_clock.push_back(hc.get(is));
    }
    return p;
}

void write_field_binary(std::ostream& os, const ScalarField& f) {
    os.write(kFieldMagic, 4);
    put_raw<std::uint8_t>(os, kVersion);
    put_raw<std::int32_t>(os, f.level);
    put_raw<std::int64_t>(os, f.min_site);
    put_raw<std::uint64_t>(os, f.values.size());
    RealCoder c;
    for (double v : f.values) c.put(os, v);
}

ScalarField read_field_binary(std::istream& is) {
    expect_magic(is, kFieldMagic);
    ScalarField f;
    f.level = get_raw<std::int32_t>(is);
    f.min_site = get_raw<std::int64_t>(is);
    const auto n = get_raw<std::uint64_t>(is);
    RealCoder c;
    for (std::uint64_t i = 0; i < n; ++i) f.values.push_back(c.get(is));
    return f;
}

void write_path_csv(std::ostream& os, const LatticeWalkPath& p) {
    os << "time,site\n";
    for (std::size_t i = 0; i < p.sites.size(); ++i) os << num(p.times[i]) << ',' << p.sites[i] << '\n';
}

void write_field_csv(std::ostream& os, const ScalarField& f) {
    os << "site,x,value\n";
    for (std::int64_t k = f.min_site; k <= f.max_site(); ++k) os << k << ',' << num(f.x(k)) << ',' << num(f.at(k)) << '\n';
}

void write_flow_csv(std::ostream& os, const FlowField& f) {
    os << 'u';
    for (double y : f.grid) os << ",y=" << num(y);
    os << '\n';
    for (std::size_t k = 0; k < f.psi.size(); ++k) {
        os << num(f.u[k]);
        for (double v : f.psi[k]) os << ',' << num(v);
        os << '\n';
    }
}

void write_trace_csv(std::ostream& os, const InverseTrace& tr) {
    os << "u,xi\n";
    for (std::size_t k = 0; k < tr.u.size(); ++k) os << num(tr.u[k]) << ',' << num(tr.xi[k]) << '\n';
}

void write_trajectory_csv(std::ostream& os, const DiffusionTrajectory& tr) {
    os << "u,t,xi,x\n";
    for (std::size_t k = 0; k < tr.t.size(); ++k)
        os << num(tr.u[k]) << ',' << num(tr.t[k]) << ',' << num(tr.xi[k]) << ',' << num(tr.x[k]) << '\n';
}

void write_events_csv(std::ostream& os, const JumpEventLog& log) {
    os << "q,kind,site,edge\n";
    for (const JumpEvent& e : log.events)
        os << num(e.q) << ',' << event_name(e.kind) << ',' << num(log.sites.at(static_cast<std::size_t>(e.site)))
           << ',' << e.edge << '\n';
}

void write_samples_csv(std::ostream& os, const std::vector<SampleSet>& sets) {
    os << "label,index,value\n";
    for (const SampleSet& s : sets)
        for (std::size_t i = 0; i < s.values.size(); ++i) os << s.label << ',' << i << ',' << num(s.values[i]) << '\n';
}

nlohmann::json trajectory_summary(const DiffusionTrajectory& tr) {
    return {{"x0", tr.x0},
            {"seed", tr.seed},
            {"du", tr.du},
            {"total_time", tr.total_time},
            {"u_end", tr.u_end},
            {"x_end", tr.x_end},
            {"y_bif", tr.y_bif},
            {"xi_range", {tr.xi_min, tr.xi_max}},
            {"oscillation", tr.oscillation},
            {"lambda_end", tr.lambda_end},
            {"time_bound", tr.time_bound},
            {"converged", tr.converged},
            {"eps_stopped", tr.eps_stopped},
            {"boundary_hit", tr.boundary_hit}};
}

nlohmann::json event_log_summary(const JumpEventLog& log) {
    return {{"seed", log.seed},
            {"end_time", log.end_time},
            {"reason", event_name(log.reason)},
            {"start", log.sites.at(static_cast<std::size_t>(log.start_site))},
            {"final", log.sites.at(static_cast<std::size_t>(log.final_site))},
            {"jumps", log.jumps},
            {"opens", log.opens},
            {"closes", log.closes},
            {"floor_warning", log.floor_warning},
            {"final_lambda", log.final_lambda}};
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary);
    if (!f) throw FormatError("cannot open " + p.string() + " for writing");
    f << text;
    if (!f) throw FormatError("write to " + p.string() + " failed");
}

void write_json_file(const std::filesystem::path& p, const nlohmann::json& j) { write_text_file(p, j.dump(2) + "\n"); }

nlohmann::json read_json_file(const std::filesystem::path& p) {
    std::ifstream f(p);
    if (!f) throw FormatError("cannot open " + p.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return nlohmann::json::parse(ss.str());
}

}  // namespace selfrep
