#include "starscat/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <sstream>

#include "starscat/csv.hpp"

namespace starscat {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (trim(s.substr(pos)) != "") throw ConfigError("trailing characters");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("invalid number: '" + s + "'");
    }
}

long long parse_int(const std::string& s) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (trim(s.substr(pos)) != "") throw ConfigError("trailing characters");
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (...) {
        throw ConfigError("invalid integer: '" + s + "'");
    }
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& s, F parse_one) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(static_cast<T>(parse_one(trim(item))));
    if (out.empty()) throw ConfigError("empty list");
    return out;
}

template <typename T>
std::string emit_list(const std::vector<T>& v, const std::function<std::string(T)>& f) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += f(v[i]);
    }
    return out;
}

struct Field {
    std::string section, key;
    std::function<std::string(const ExperimentConfig&)> get;
    std::function<void(ExperimentConfig&, const std::string&)> set;
};

std::vector<Field> schema() {
    auto d = [](double v) { return format_double(v); };
    auto i = [](long long v) { return std::to_string(v); };
    std::vector<Field> f;
    f.push_back({"shape", "kind", [](const auto& c) { return c.shape.kind; },
                 [](auto& c, const std::string& v) {
                     if (v != "ellipse" && v != "octagon")
                         throw ConfigError("shape.kind must be ellipse or octagon");
                     c.shape.kind = v;
                 }});
    f.push_back({"shape", "a", [d](const auto& c) { return d(c.shape.a); },
                 [](auto& c, const std::string& v) { c.shape.a = parse_double(v); }});
    f.push_back({"shape", "b", [d](const auto& c) { return d(c.shape.b); },
                 [](auto& c, const std::string& v) { c.shape.b = parse_double(v); }});
    f.push_back({"wave", "kappa",
                 [d](const auto& c) {
                     return emit_list<double>(c.wave.kappa, d);
                 },
                 [](auto& c, const std::string& v) {
                     c.wave.kappa = parse_list<double>(v, parse_double);
                 }});
    f.push_back({"grid", "radial", [i](const auto& c) { return i(c.grid.radial); },
                 [](auto& c, const std::string& v) { c.grid.radial = (int)parse_int(v); }});
    f.push_back({"grid", "angular", [i](const auto& c) { return i(c.grid.angular); },
                 [](auto& c, const std::string& v) { c.grid.angular = (int)parse_int(v); }});
    f.push_back({"grid", "naive_z", [i](const auto& c) { return i(c.grid.naive_z); },
                 [](auto& c, const std::string& v) { c.grid.naive_z = (int)parse_int(v); }});
    f.push_back({"grid", "naive_theta", [i](const auto& c) { return i(c.grid.naive_theta); },
                 [](auto& c, const std::string& v) { c.grid.naive_theta = (int)parse_int(v); }});
    f.push_back({"grid", "kernel", [](const auto& c) { return c.grid.kernel; },
                 [](auto& c, const std::string& v) {
                     if (v != "ensemble" && v != "tensor")
                         throw ConfigError("grid.kernel must be ensemble or tensor");
                     c.grid.kernel = v;
                 }});
    f.push_back({"thresholds", "eps_ev", [d](const auto& c) { return d(c.thresholds.eps_ev); },
                 [](auto& c, const std::string& v) { c.thresholds.eps_ev = parse_double(v); }});
    f.push_back({"thresholds", "eps_ed", [d](const auto& c) { return d(c.thresholds.eps_ed); },
                 [](auto& c, const std::string& v) { c.thresholds.eps_ed = parse_double(v); }});
    f.push_back({"thresholds", "max_unsatisfied",
                 [i](const auto& c) { return i(c.thresholds.max_unsatisfied); },
                 [](auto& c, const std::string& v) {
                     c.thresholds.max_unsatisfied = (int)parse_int(v);
                 }});
    f.push_back({"sources", "count",
                 [i](const auto& c) {
                     return emit_list<int>(c.sources.count, i);
                 },
                 [](auto& c, const std::string& v) {
                     c.sources.count = parse_list<int>(v, parse_int);
                 }});
    f.push_back({"sources", "modes", [i](const auto& c) { return i(c.sources.modes); },
                 [](auto& c, const std::string& v) { c.sources.modes = (int)parse_int(v); }});
    f.push_back({"sources", "radial_factor",
                 [d](const auto& c) { return d(c.sources.radial_factor); },
                 [](auto& c, const std::string& v) {
                     c.sources.radial_factor = parse_double(v);
                 }});
    f.push_back({"sources", "degree", [i](const auto& c) { return i(c.sources.degree); },
                 [](auto& c, const std::string& v) { c.sources.degree = (int)parse_int(v); }});
    f.push_back({"gpc", "order", [i](const auto& c) { return i(c.gpc.order); },
                 [](auto& c, const std::string& v) { c.gpc.order = (int)parse_int(v); }});
    f.push_back({"quadrature", "surface_nodes",
                 [i](const auto& c) { return i(c.quadrature.surface_nodes); },
                 [](auto& c, const std::string& v) {
                     c.quadrature.surface_nodes = (int)parse_int(v);
                 }});
    f.push_back({"quadrature", "segment_nodes",
                 [i](const auto& c) { return i(c.quadrature.segment_nodes); },
                 [](auto& c, const std::string& v) {
                     c.quadrature.segment_nodes = (int)parse_int(v);
                 }});
    f.push_back({"quadrature", "z_nodes", [i](const auto& c) { return i(c.quadrature.z_nodes); },
                 [](auto& c, const std::string& v) {
                     c.quadrature.z_nodes = (int)parse_int(v);
                 }});
    f.push_back({"oracle", "samples", [i](const auto& c) { return i(c.oracle.samples); },
                 [](auto& c, const std::string& v) { c.oracle.samples = (int)parse_int(v); }});
    f.push_back({"oracle", "seed",
                 [](const auto& c) { return std::to_string(c.oracle.seed); },
                 [](auto& c, const std::string& v) {
                     c.oracle.seed = (unsigned long long)parse_int(v);
                 }});
    f.push_back({"oracle", "nodes", [i](const auto& c) { return i(c.oracle.nodes); },
                 [](auto& c, const std::string& v) { c.oracle.nodes = (int)parse_int(v); }});
    f.push_back({"oracle", "grading",
                 [i](const auto& c) { return i(c.oracle.grading); },
                 [](auto& c, const std::string& v) {
                     c.oracle.grading = (int)parse_int(v);
                 }});
    f.push_back({"oracle", "tolerance", [d](const auto& c) { return d(c.oracle.tolerance); },
                 [](auto& c, const std::string& v) { c.oracle.tolerance = parse_double(v); }});
    f.push_back({"output", "dir", [](const auto& c) { return c.output.dir; },
                 [](auto& c, const std::string& v) { c.output.dir = v; }});
    f.push_back({"run", "threads", [i](const auto& c) { return i(c.threads); },
                 [](auto& c, const std::string& v) { c.threads = (int)parse_int(v); }});
    return f;
}

const std::vector<Field>& fields() {
    static const std::vector<Field> f = schema();
    return f;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool found = false;
        for (const Field& fl : fields())
            if (fl.section == section && fl.key == key) {
                try {
                    fl.set(cfg, value);
                } catch (const ConfigError& e) {
                    throw ConfigError("line " + std::to_string(lineno) + " (" + section + "." +
                                      key + "): " + e.what());
                }
                found = true;
                break;
            }
        if (!found)
            throw ConfigError("line " + std::to_string(lineno) + ": unknown key '" + section +
                              "." + key + "'");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string emit_config(const ExperimentConfig& cfg) {
    std::string out;
    std::string section;
    for (const Field& fl : fields()) {
        if (fl.section != section) {
            if (!section.empty()) out += "\n";
            section = fl.section;
            out += "[" + section + "]\n";
        }
        out += fl.key + " = " + fl.get(cfg) + "\n";
    }
    return out;
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("--set expects section.key=value, got '" + assignment + "'");
    const std::string section = trim(assignment.substr(0, dot));
    const std::string key = trim(assignment.substr(dot + 1, eq - dot - 1));
    const std::string value = trim(assignment.substr(eq + 1));
    for (const Field& fl : fields())
        if (fl.section == section && fl.key == key) {
            fl.set(cfg, value);
            return;
        }
    throw ConfigError("unknown config key '" + section + "." + key + "'");
}

void validate_config(const ExperimentConfig& cfg) {
    const auto& c = cfg;
    if (!(c.shape.a > 0 && c.shape.b > 0)) throw ConfigError("shape.a, shape.b must be > 0");
    if (c.shape.kind == "ellipse") {
        if (c.shape.a < c.shape.b) throw ConfigError("ellipse requires a >= b");
    } else if (c.shape.kind == "octagon") {
        if (!(c.shape.a > c.shape.b)) throw ConfigError("octagon requires a > b");
    } else {
        throw ConfigError("shape.kind must be ellipse or octagon");
    }
    if (c.wave.kappa.empty()) throw ConfigError("wave.kappa must be nonempty");
    for (double k : c.wave.kappa)
        if (!(k > 0)) throw ConfigError("wave.kappa entries must be > 0");
    if (!(c.thresholds.eps_ev >= c.thresholds.eps_ed && c.thresholds.eps_ed > 0))
        throw ConfigError("thresholds require eps_ev >= eps_ed > 0");
    for (int L : c.sources.count)
        if (L < 1) throw ConfigError("sources.count entries must be >= 1");
    if (c.sources.modes < 0) throw ConfigError("sources.modes must be >= 0");
    if (!(c.sources.radial_factor > 0 && c.sources.radial_factor < 1))
        throw ConfigError("sources.radial_factor must lie in (0, 1)");
    if (c.sources.degree < 0) throw ConfigError("sources.degree must be >= 0");
    if (c.grid.kernel != "ensemble" && c.grid.kernel != "tensor")
        throw ConfigError("grid.kernel must be ensemble or tensor");
    for (int v : {c.grid.radial, c.grid.angular, c.grid.naive_z, c.grid.naive_theta,
                  c.quadrature.surface_nodes, c.quadrature.segment_nodes, c.quadrature.z_nodes})
        if (v < 1) throw ConfigError("grid/quadrature/oracle counts must be >= 1");
    if (c.gpc.order < 0) throw ConfigError("gpc.order must be >= 0");
    if (c.oracle.samples < 2) throw ConfigError("oracle.samples must be >= 2");
    if (c.oracle.nodes < 16) throw ConfigError("oracle.nodes must be >= 16");
    if (c.oracle.grading < 2) throw ConfigError("oracle.grading must be >= 2");
    if (c.threads < 1) throw ConfigError("run.threads must be >= 1");
}

std::string config_hash(const ExperimentConfig& cfg) {
    ExperimentConfig canon = cfg;
    canon.threads = 1;  // outputs must not depend on the thread count
    const std::string s = emit_config(canon);
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    snprintf(buf, sizeof(buf), "%016llx", (unsigned long long)h);
    return buf;
}

}  // namespace starscat
