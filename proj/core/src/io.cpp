#include "swarmctl/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "swarmctl/error.hpp"

namespace swarmctl {

std::string format_double(double value) {
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    if (value == 0.0) return std::signbit(value) ? "-0" : "0";
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, ptr);
}

double parse_double(std::string_view text, const std::string& source, std::size_t line) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty())
        throw ParseError(source, line, "cannot parse number from '" + std::string(text) + "'");
    return value;
}

struct CsvWriter::Impl {
    std::ofstream out;
    bool first = true;
    std::string path;
};

CsvWriter::CsvWriter(const std::filesystem::path& path, std::vector<std::string> header) : impl_(new Impl) {
    impl_->path = path.string();
    impl_->out.open(path);
    if (!impl_->out) {
        delete impl_;
        throw Error("cannot open '" + path.string() + "' for writing");
    }
    for (std::size_t i = 0; i < header.size(); ++i) impl_->out << (i ? "," : "") << header[i];
    impl_->out << '\n';
}

CsvWriter::~CsvWriter() { delete impl_; }

CsvWriter& CsvWriter::cell(double v) { return cell(std::string_view(format_double(v))); }

CsvWriter& CsvWriter::cell(long long v) { return cell(std::string_view(std::to_string(v))); }

CsvWriter& CsvWriter::cell(std::string_view v) {
    if (!impl_->first) impl_->out << ',';
    impl_->out << v;
    impl_->first = false;
    return *this;
}

void CsvWriter::end_row() {
    impl_->out << '\n';
    impl_->first = true;
    if (!impl_->out) throw Error("write failed for '" + impl_->path + "'");
}

void write_nodal_csv(const std::filesystem::path& path, const Mesh& mesh, const Eigen::VectorXd& values,
                     const std::string& name) {
    if (static_cast<std::size_t>(values.size()) != mesh.num_vertices())
        throw DimensionError("nodal field has " + std::to_string(values.size()) + " entries, mesh has " +
                             std::to_string(mesh.num_vertices()) + " vertices");
    CsvWriter csv(path, {"node_index", "x", "y", name});
    for (std::size_t i = 0; i < mesh.num_vertices(); ++i) {
        csv.cell(i).cell(mesh.vertices()[i].x).cell(mesh.vertices()[i].y).cell(values[static_cast<Eigen::Index>(i)]);
        csv.end_row();
    }
}

void write_vector_csv(const std::filesystem::path& path, const Eigen::VectorXd& values, const std::string& name) {
    CsvWriter csv(path, {"index", name});
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        csv.cell(static_cast<long long>(i)).cell(values[i]);
        csv.end_row();
    }
}

namespace {

std::vector<double> last_column(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path.string(), 0, "cannot open file");
    std::string line;
    std::size_t lineno = 0;
    std::vector<double> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 || line.empty() || line == "\r") continue;
        auto comma = line.rfind(',');
        out.push_back(parse_double(std::string_view(line).substr(comma == std::string::npos ? 0 : comma + 1),
                                   path.string(), lineno));
    }
    return out;
}

}  // namespace

Eigen::VectorXd read_vector_csv(const std::filesystem::path& path) {
    auto v = last_column(path);
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Eigen::VectorXd read_nodal_csv(const std::filesystem::path& path, std::size_t expected_size) {
    auto v = last_column(path);
    if (v.size() != expected_size)
        throw DimensionError("'" + path.string() + "' has " + std::to_string(v.size()) + " rows, expected " +
                             std::to_string(expected_size));
    return Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_vtk(const std::filesystem::path& path, const Mesh& mesh, const std::vector<VtkPointData>& data,
               const std::string& title) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    const auto nv = mesh.num_vertices();
    const auto nt = mesh.num_triangles();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const auto& p : mesh.vertices()) out << format_double(p.x) << ' ' << format_double(p.y) << " 0\n";
    out << "CELLS " << nt << ' ' << 4 * nt << '\n';
    for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << nt << '\n';
    for (std::size_t t = 0; t < nt; ++t) out << "5\n";
    if (data.empty()) return;
    out << "POINT_DATA " << nv << '\n';
    for (const auto& d : data) {
        if (d.scalars) {
            if (static_cast<std::size_t>(d.scalars->size()) != nv) throw DimensionError("VTK field '" + d.name + "' has wrong size");
            out << "SCALARS " << d.name << " double 1\nLOOKUP_TABLE default\n";
            for (std::size_t i = 0; i < nv; ++i) out << format_double((*d.scalars)[static_cast<Eigen::Index>(i)]) << '\n';
        } else if (d.vx && d.vy) {
            if (static_cast<std::size_t>(d.vx->size()) != nv || static_cast<std::size_t>(d.vy->size()) != nv)
                throw DimensionError("VTK field '" + d.name + "' has wrong size");
            out << "VECTORS " << d.name << " double\n";
            for (std::size_t i = 0; i < nv; ++i) {
                const auto k = static_cast<Eigen::Index>(i);
                out << format_double((*d.vx)[k]) << ' ' << format_double((*d.vy)[k]) << " 0\n";
            }
        }
    }
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace swarmctl
