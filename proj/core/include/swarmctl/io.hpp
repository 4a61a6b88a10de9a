#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "swarmctl/mesh.hpp"

namespace swarmctl {

/// Shortest decimal representation that parses back to the same double.
/// Output is locale-independent and deterministic across runs.
std::string format_double(double value);

/// Locale-independent parse; throws ParseError on trailing garbage.
double parse_double(std::string_view text, const std::string& source = "<value>", std::size_t line = 0);

/// Minimal CSV writer: header once, then rows of mixed integer/double cells.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::vector<std::string> header);
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;
    ~CsvWriter();

    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::size_t v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(std::string_view v);
    void end_row();

private:
    struct Impl;
    Impl* impl_;
};

/// `node_index,x,y,<name>` with one row per vertex.
void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh, const Eigen::VectorXd& values,
                     const std::string& name = "q");

/// Single-column CSV `index,<name>`.
void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& values, const std::string& name);
Eigen::VectorXd read_vector_csv(const std::filesystem::path& path);

/// Reads the last column of a `node_index,...,value` CSV as a nodal vector.
Eigen::VectorXd read_nodal_csv(const std::filesystem::path& path, std::size_t expected_size);

struct VtkPointData {
    std::string name;
    const Eigen::VectorXd* scalars = nullptr;       // either scalars
    const Eigen::VectorXd* vx = nullptr;            // or a 2D vector field
    const Eigen::VectorXd* vy = nullptr;
};

/// VTK legacy ASCII unstructured grid with triangle cells and point data.
void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<VtkPointData>& data,
               const std::string& title = "swarmctl");

}  // namespace swarmctl
