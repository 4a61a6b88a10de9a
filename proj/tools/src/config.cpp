#include "config.hpp"

#include <fstream>
#include <set>

#include "swarmctl/error.hpp"

namespace swarmctl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Collects problems instead of stopping at the first one.
class Reader {
public:
    Reader(std::vector<std::string>& problems, fs::path base) : problems_(problems), base_(std::move(base)) {}

    void problem(const std::string& where, const std::string& what) { problems_.push_back(where + ": " + what); }

    bool object(const json& j, const std::string& where) {
        if (j.is_object()) return true;
        problem(where, "expected an object");
        return false;
    }

    void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
        if (!j.is_object()) return;
        std::set<std::string> allowed(keys.begin(), keys.end());
        for (const auto& [k, v] : j.items())
            if (!allowed.count(k)) problem(where, "unknown key '" + k + "'");
    }

    double number(const json& j, const char* key, double fallback, const std::string& where) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_number()) {
            problem(where + "." + key, "expected a number");
            return fallback;
        }
        return v.get<double>();
    }

    long long integer(const json& j, const char* key, long long fallback, const std::string& where) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_number_integer()) {
            problem(where + "." + key, "expected an integer");
            return fallback;
        }
        return v.get<long long>();
    }

    bool boolean(const json& j, const char* key, bool fallback, const std::string& where) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_boolean()) {
            problem(where + "." + key, "expected true or false");
            return fallback;
        }
        return v.get<bool>();
    }

    std::string string(const json& j, const char* key, const std::string& fallback, const std::string& where) {
        if (!j.contains(key)) return fallback;
        const auto& v = j.at(key);
        if (!v.is_string()) {
            problem(where + "." + key, "expected a string");
            return fallback;
        }
        return v.get<std::string>();
    }

    fs::path path(const json& j, const char* key, const std::string& where) {
        const auto s = string(j, key, "", where);
        if (s.empty()) return {};
        fs::path p(s);
        return p.is_absolute() || base_.empty() ? p : (base_ / p).lexically_normal();
    }

    std::vector<double> numbers(const json& v, std::size_t n, const std::string& where) {
        if (!v.is_array() || v.size() != n) {
            problem(where, "expected an array of " + std::to_string(n) + " numbers");
            return std::vector<double>(n, 0.0);
        }
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) {
                problem(where, "expected numbers");
                return std::vector<double>(n, 0.0);
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    Rect rect(const json& v, const std::string& where) {
        const auto b = numbers(v, 4, where);
        return {b[0], b[1], b[2], b[3]};
    }

    DensitySpec density(const json& j, const std::string& where) {
        DensitySpec d;
        if (!object(j, where)) return d;
        const auto type = string(j, "type", "", where);
        if (type == "uniform") {
            only_keys(j, where, {"type"});
        } else if (type == "gaussian") {
            only_keys(j, where, {"type", "center", "sigma"});
            d.kind = DensityKind::Gaussian;
            if (j.contains("center")) {
                const auto c = numbers(j.at("center"), 2, where + ".center");
                d.center = {c[0], c[1]};
            } else {
                problem(where, "gaussian needs 'center'");
            }
            d.sigma = number(j, "sigma", d.sigma, where);
        } else if (type == "indicator") {
            only_keys(j, where, {"type", "regions"});
            d.kind = DensityKind::Indicator;
            if (!j.contains("regions") || !j.at("regions").is_array() || j.at("regions").empty()) {
                problem(where, "indicator needs a nonempty 'regions' array");
            } else {
                for (std::size_t k = 0; k < j.at("regions").size(); ++k)
                    d.regions.push_back(rect(j.at("regions")[k], where + ".regions[" + std::to_string(k) + "]"));
            }
        } else if (type == "nodal") {
            only_keys(j, where, {"type", "file"});
            d.kind = DensityKind::NodalFile;
            d.file = path(j, "file", where);
            if (d.file.empty()) problem(where, "nodal density needs 'file'");
        } else {
            problem(where + ".type", "expected uniform, gaussian, indicator or nodal, got '" + type + "'");
        }
        return d;
    }

private:
    std::vector<std::string>& problems_;
    fs::path base_;
};

json rect_json(const Rect& r) { return json::array({r.x0, r.y0, r.x1, r.y1}); }

json density_json(const DensitySpec& d) {
    switch (d.kind) {
        case DensityKind::Uniform: return {{"type", "uniform"}};
        case DensityKind::Gaussian:
            return {{"type", "gaussian"}, {"center", json::array({d.center.x, d.center.y})}, {"sigma", d.sigma}};
        case DensityKind::Indicator: {
            json regions = json::array();
            for (const auto& r : d.regions) regions.push_back(rect_json(r));
            return {{"type", "indicator"}, {"regions", regions}};
        }
        case DensityKind::NodalFile: return {{"type", "nodal"}, {"file", d.file.string()}};
    }
    return {};
}

const char* control_name(ControlSource s) {
    switch (s) {
        case ControlSource::Solve: return "solve";
        case ControlSource::Zero: return "zero";
        case ControlSource::Directory: return "directory";
    }
    return "solve";
}

}  // namespace

std::vector<std::string> RunConfig::problems() const {
    std::vector<std::string> p;
    for (const auto& s : ocp.problems()) p.push_back("ocp: " + s);
    if (mesh.file) {
        if (!fs::exists(*mesh.file)) p.push_back("mesh.file: '" + mesh.file->string() + "' does not exist");
    } else {
        if (!(mesh.h > 0.0)) p.push_back("mesh.h: must be positive");
        if (!(mesh.domain.x1 > mesh.domain.x0 && mesh.domain.y1 > mesh.domain.y0))
            p.push_back("mesh.domain: expected x0 < x1 and y0 < y1");
    }
    auto check_density = [&](const DensitySpec& d, const std::string& where) {
        if (d.kind == DensityKind::Gaussian && !(d.sigma > 0.0)) p.push_back(where + ".sigma: must be positive");
        if (d.kind == DensityKind::NodalFile && !fs::exists(d.file))
            p.push_back(where + ".file: '" + d.file.string() + "' does not exist");
        for (const auto& r : d.regions)
            if (!(r.x1 > r.x0 && r.y1 > r.y0)) p.push_back(where + ".regions: expected x0 < x1 and y0 < y1");
    };
    check_density(target, "target");
    if (initial.empty()) p.push_back("initial: at least one initial density is required");
    std::set<std::string> names;
    for (const auto& d : initial) {
        check_density(d.spec, "initial." + d.name);
        if (d.name.empty() || d.name.find_first_of("/\\ ") != std::string::npos)
            p.push_back("initial: name '" + d.name + "' must be nonempty without spaces or slashes");
        if (!names.insert(d.name).second) p.push_back("initial: duplicate name '" + d.name + "'");
    }
    if (control == ControlSource::Directory) {
        for (const char* f : {"u_x.csv", "u_y.csv"})
            if (!fs::exists(control_dir / f)) p.push_back("control.directory: '" + (control_dir / f).string() + "' does not exist");
    }
    if (particles.count == 0) p.push_back("particles.count: must be positive");
    if (particles.dt && !(*particles.dt > 0.0)) p.push_back("particles.dt: must be positive");
    if (particles.T && !(*particles.T > 0.0)) p.push_back("particles.T: must be positive");
    if (particles.checkpoints == 0) p.push_back("particles.checkpoints: must be positive");
    if (long_horizon < 0.0) p.push_back("long_horizon: must be nonnegative");
    if (threshold_fraction < 0.0 || threshold_fraction >= 1.0) p.push_back("threshold_fraction: must be in [0, 1)");
    if (testcase < 0 || testcase > 3) p.push_back("testcase: must be 0 (none), 1, 2 or 3");
    return p;
}

void RunConfig::validate() const {
    auto p = problems();
    if (!p.empty()) throw ConfigError(std::move(p));
}

RunConfig parse_config(const json& j, const fs::path& base_dir) {
    std::vector<std::string> problems;
    Reader r(problems, base_dir);
    RunConfig c;
    if (!r.object(j, "config")) throw ConfigError(problems);
    r.only_keys(j, "config", {"testcase", "mesh", "target", "initial", "drift", "ocp", "long_horizon",
                              "threshold_fraction", "control", "particles", "snapshot_every", "out", "seed"});

    c.testcase = static_cast<int>(r.integer(j, "testcase", 0, "config"));

    if (j.contains("mesh") && r.object(j.at("mesh"), "mesh")) {
        const auto& m = j.at("mesh");
        r.only_keys(m, "mesh", {"file", "domain", "h", "holes"});
        if (m.contains("file")) {
            c.mesh.file = r.path(m, "file", "mesh");
            if (m.contains("domain") || m.contains("h") || m.contains("holes"))
                r.problem("mesh", "'file' cannot be combined with generator fields");
        }
        if (m.contains("domain")) c.mesh.domain = r.rect(m.at("domain"), "mesh.domain");
        c.mesh.h = r.number(m, "h", c.mesh.h, "mesh");
        if (m.contains("holes")) {
            const auto& hs = m.at("holes");
            if (!hs.is_array()) r.problem("mesh.holes", "expected an array");
            else
                for (std::size_t k = 0; k < hs.size(); ++k) {
                    const std::string where = "mesh.holes[" + std::to_string(k) + "]";
                    const auto& h = hs[k];
                    if (!r.object(h, where)) continue;
                    const auto type = r.string(h, "type", "", where);
                    if (type == "circle") {
                        r.only_keys(h, where, {"type", "center", "radius"});
                        const auto cc = r.numbers(h.value("center", json()), 2, where + ".center");
                        c.mesh.holes.emplace_back(Circle{{cc[0], cc[1]}, r.number(h, "radius", 0.0, where)});
                    } else if (type == "rect") {
                        r.only_keys(h, where, {"type", "bounds"});
                        c.mesh.holes.emplace_back(r.rect(h.value("bounds", json()), where + ".bounds"));
                    } else {
                        r.problem(where + ".type", "expected circle or rect, got '" + type + "'");
                    }
                }
        }
    }

    if (j.contains("target")) c.target = r.density(j.at("target"), "target");
    else r.problem("config", "missing 'target'");

    if (j.contains("initial")) {
        const auto& in = j.at("initial");
        c.initial.clear();
        if (in.is_array()) {
            for (std::size_t k = 0; k < in.size(); ++k) {
                const std::string where = "initial[" + std::to_string(k) + "]";
                if (!r.object(in[k], where)) continue;
                r.only_keys(in[k], where, {"name", "density"});
                const auto name = r.string(in[k], "name", "initial" + std::to_string(k), where);
                if (in[k].contains("density")) c.initial.push_back({name, r.density(in[k].at("density"), where + ".density")});
                else r.problem(where, "missing 'density'");
            }
        } else {
            c.initial.push_back({"initial", r.density(in, "initial")});
        }
    }

    const auto drift = r.string(j, "drift", "none", "config");
    if (drift == "none") c.drift = DriftKind::None;
    else if (drift == "cellular") c.drift = DriftKind::Cellular;
    else r.problem("drift", "expected none or cellular, got '" + drift + "'");

    if (j.contains("ocp") && r.object(j.at("ocp"), "ocp")) {
        const auto& o = j.at("ocp");
        r.only_keys(o, "ocp", {"mu", "alpha", "beta", "beta_g", "tol", "max_iter", "dynamic_max_iter", "theta", "dt",
                               "T", "lumped", "armijo"});
        c.ocp.mu = r.number(o, "mu", c.ocp.mu, "ocp");
        c.ocp.alpha = r.number(o, "alpha", c.ocp.alpha, "ocp");
        c.ocp.beta = r.number(o, "beta", c.ocp.beta, "ocp");
        c.ocp.beta_g = r.number(o, "beta_g", c.ocp.beta_g, "ocp");
        c.ocp.tol = r.number(o, "tol", c.ocp.tol, "ocp");
        c.ocp.max_iter = static_cast<int>(r.integer(o, "max_iter", c.ocp.max_iter, "ocp"));
        c.ocp.dynamic_max_iter = static_cast<int>(r.integer(o, "dynamic_max_iter", c.ocp.dynamic_max_iter, "ocp"));
        c.ocp.theta = r.number(o, "theta", c.ocp.theta, "ocp");
        c.ocp.dt = r.number(o, "dt", c.ocp.dt, "ocp");
        c.ocp.T = r.number(o, "T", c.ocp.T, "ocp");
        c.ocp.lumped = r.boolean(o, "lumped", c.ocp.lumped, "ocp");
        if (o.contains("armijo") && r.object(o.at("armijo"), "ocp.armijo")) {
            const auto& a = o.at("armijo");
            r.only_keys(a, "ocp.armijo", {"c1", "shrink", "max_backtracks"});
            c.ocp.armijo.c1 = r.number(a, "c1", c.ocp.armijo.c1, "ocp.armijo");
            c.ocp.armijo.shrink = r.number(a, "shrink", c.ocp.armijo.shrink, "ocp.armijo");
            c.ocp.armijo.max_backtracks =
                static_cast<int>(r.integer(a, "max_backtracks", c.ocp.armijo.max_backtracks, "ocp.armijo"));
        }
    }

    c.long_horizon = r.number(j, "long_horizon", 0.0, "config");
    c.threshold_fraction = r.number(j, "threshold_fraction", 0.0, "config");

    if (j.contains("control") && r.object(j.at("control"), "control")) {
        const auto& ctl = j.at("control");
        r.only_keys(ctl, "control", {"source", "directory"});
        const auto src = r.string(ctl, "source", "solve", "control");
        if (src == "solve") c.control = ControlSource::Solve;
        else if (src == "zero") c.control = ControlSource::Zero;
        else if (src == "directory") {
            c.control = ControlSource::Directory;
            c.control_dir = r.path(ctl, "directory", "control");
            if (c.control_dir.empty()) r.problem("control", "source 'directory' needs 'directory'");
        } else {
            r.problem("control.source", "expected solve, zero or directory, got '" + src + "'");
        }
    }

    if (j.contains("particles") && r.object(j.at("particles"), "particles")) {
        const auto& pj = j.at("particles");
        r.only_keys(pj, "particles", {"count", "dt", "T", "checkpoints"});
        const auto count = r.integer(pj, "count", static_cast<long long>(c.particles.count), "particles");
        if (count <= 0) r.problem("particles.count", "must be positive");
        else c.particles.count = static_cast<std::size_t>(count);
        if (pj.contains("dt")) c.particles.dt = r.number(pj, "dt", 0.0, "particles");
        if (pj.contains("T")) c.particles.T = r.number(pj, "T", 0.0, "particles");
        const auto cp = r.integer(pj, "checkpoints", static_cast<long long>(c.particles.checkpoints), "particles");
        if (cp <= 0) r.problem("particles.checkpoints", "must be positive");
        else c.particles.checkpoints = static_cast<std::size_t>(cp);
    }

    const auto snap = r.integer(j, "snapshot_every", static_cast<long long>(c.snapshot_every), "config");
    if (snap < 0) r.problem("snapshot_every", "must be nonnegative");
    else c.snapshot_every = static_cast<std::size_t>(snap);
    if (j.contains("out")) c.out = r.path(j, "out", "config");
    const auto seed = r.integer(j, "seed", 0, "config");
    if (seed < 0) r.problem("seed", "must be nonnegative");
    else c.seed = static_cast<std::uint64_t>(seed);

    for (const auto& p : c.problems()) problems.push_back(p);
    if (!problems.empty()) throw ConfigError(problems);
    return c;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file '" + path.string() + "'"});
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError({"'" + path.string() + "' is not valid JSON: " + e.what()});
    }
    return parse_config(j, fs::absolute(path).parent_path());
}

json to_json(const RunConfig& c) {
    json j;
    j["testcase"] = c.testcase;
    json mesh;
    if (c.mesh.file) {
        mesh["file"] = c.mesh.file->string();
    } else {
        mesh["domain"] = rect_json(c.mesh.domain);
        mesh["h"] = c.mesh.h;
        json holes = json::array();
        for (const auto& h : c.mesh.holes) {
            if (const auto* circle = std::get_if<Circle>(&h))
                holes.push_back({{"type", "circle"},
                                 {"center", json::array({circle->center.x, circle->center.y})},
                                 {"radius", circle->radius}});
            else
                holes.push_back({{"type", "rect"}, {"bounds", rect_json(std::get<Rect>(h))}});
        }
        mesh["holes"] = holes;
    }
    j["mesh"] = mesh;
    j["target"] = density_json(c.target);
    json initial = json::array();
    for (const auto& d : c.initial) initial.push_back({{"name", d.name}, {"density", density_json(d.spec)}});
    j["initial"] = initial;
    j["drift"] = c.drift == DriftKind::Cellular ? "cellular" : "none";
    j["ocp"] = {{"mu", c.ocp.mu},
                {"alpha", c.ocp.alpha},
                {"beta", c.ocp.beta},
                {"beta_g", c.ocp.beta_g},
                {"tol", c.ocp.tol},
                {"max_iter", c.ocp.max_iter},
                {"dynamic_max_iter", c.ocp.dynamic_max_iter},
                {"theta", c.ocp.theta},
                {"dt", c.ocp.dt},
                {"T", c.ocp.T},
                {"lumped", c.ocp.lumped},
                {"armijo",
                 {{"c1", c.ocp.armijo.c1}, {"shrink", c.ocp.armijo.shrink}, {"max_backtracks", c.ocp.armijo.max_backtracks}}}};
    j["long_horizon"] = c.long_horizon;
    j["threshold_fraction"] = c.threshold_fraction;
    json control = {{"source", control_name(c.control)}};
    if (c.control == ControlSource::Directory) control["directory"] = c.control_dir.string();
    j["control"] = control;
    json particles = {{"count", c.particles.count}, {"checkpoints", c.particles.checkpoints}};
    if (c.particles.dt) particles["dt"] = *c.particles.dt;
    if (c.particles.T) particles["T"] = *c.particles.T;
    j["particles"] = particles;
    j["snapshot_every"] = c.snapshot_every;
    j["out"] = c.out.string();
    j["seed"] = c.seed;
    return j;
}

RunConfig testcase_config(int id, bool fine_scale) {
    const TestCase tc = testcase_preset(id, fine_scale);
    RunConfig c;
    c.testcase = id;
    c.mesh = tc.mesh;
    c.target = tc.target;
    c.initial = tc.initial;
    c.drift = tc.drift;
    c.ocp = tc.ocp;
    c.long_horizon = tc.long_horizon;
    c.threshold_fraction = tc.threshold_fraction;
    c.out = "testcase" + std::to_string(id);
    return c;
}

}  // namespace swarmctl::cli
