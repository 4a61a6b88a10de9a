#pragma once

#include <filesystem>
#include <iosfwd>

#include "config.hpp"
#include "swarmctl/ocp_dynamic.hpp"

namespace swarmctl::cli {

void cmd_mesh_gen(const RunConfig& config);
/// Prints a quality report for a mesh file; throws on invalid meshes.
MeshQualityReport cmd_mesh_check(const std::filesystem::path& file, std::ostream& out);
void cmd_static(const RunConfig& config);
void cmd_simulate(const RunConfig& config);
void cmd_dynamic(const RunConfig& config);
void cmd_particles(const RunConfig& config);
void cmd_certify(const RunConfig& config);
void cmd_testcase(const RunConfig& config);

/// Full command line: parses arguments, dispatches, prints
/// `ERROR kind=<kind> message="..."` to stderr on failure. Returns the exit code.
int run(int argc, char** argv);

}  // namespace swarmctl::cli
