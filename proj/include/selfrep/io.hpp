#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "selfrep/bass_burdzy.hpp"
#include "selfrep/brownian_engine.hpp"
#include "selfrep/discrete_selfrep.hpp"
#include "selfrep/field_sampler.hpp"
#include "selfrep/selfrep_diffusion.hpp"
#include "selfrep/stats.hpp"

namespace selfrep {

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Binary logs: 4-byte magic, format version, header fields, then a body in
// which sites are zigzag varint deltas and reals are varints of the XOR of
// consecutive IEEE bit patterns. Decoding is bit-exact.
void write_path_binary(std::ostream& os, const LatticeWalkPath& path);
LatticeWalkPath read_path_binary(std::istream& is);
void write_field_binary(std::ostream& os, const ScalarField& field);
ScalarField read_field_binary(std::istream& is);

void write_path_csv(std::ostream& os, const LatticeWalkPath& path);            // time,site
void write_field_csv(std::ostream& os, const ScalarField& field);              // site,x,value
void write_flow_csv(std::ostream& os, const FlowField& flow);                  // u, then one column per line
void write_trace_csv(std::ostream& os, const InverseTrace& trace);             // u,xi
void write_trajectory_csv(std::ostream& os, const DiffusionTrajectory& traj);  // u,t,xi,x
void write_events_csv(std::ostream& os, const JumpEventLog& log);              // q,kind,site,edge
void write_samples_csv(std::ostream& os, const std::vector<SampleSet>& sets);  // label,index,value

nlohmann::json trajectory_summary(const DiffusionTrajectory& traj);
nlohmann::json event_log_summary(const JumpEventLog& log);

// Creates parent directories; numbers are written with round-trip precision.
void write_text_file(const std::filesystem::path& p, const std::string& text);
void write_json_file(const std::filesystem::path& p, const nlohmann::json& j);
nlohmann::json read_json_file(const std::filesystem::path& p);

}  // namespace selfrep
