#include "robinlab/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace robinlab {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& v) {
    errno = 0;
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (v.empty() || end != v.c_str() + v.size() || errno == ERANGE || !std::isfinite(x)) {
        throw ConfigError("key '" + key + "': expected a finite number, got '" + v + "'");
    }
    return x;
}

int parse_int(const std::string& key, const std::string& v) {
    const double x = parse_double(key, v);
    if (x != std::floor(x) || std::abs(x) > 1e9) throw ConfigError("key '" + key + "': expected an integer");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ConfigError("key '" + key + "': expected true or false");
}

std::string one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
    for (const char* a : allowed) {
        if (v == a) return v;
    }
    std::string msg = "key '" + key + "': '" + v + "' is not one of";
    for (const char* a : allowed) msg += std::string(" ") + a;
    throw ConfigError(msg);
}

struct Entry {
    const char* section;
    const char* key;
    std::function<std::string(const ProblemConfig&)> get;
    std::function<void(ProblemConfig&, const std::string&)> set;
};

#define RL_DOUBLE(sec, name)                                                         \
    Entry{sec, #name, [](const ProblemConfig& c) { return fmt_double(c.name); },     \
          [](ProblemConfig& c, const std::string& v) { c.name = parse_double(#name, v); }}

const std::vector<Entry>& schema() {
    static const std::vector<Entry> entries = {
        Entry{"domain", "kind", [](const ProblemConfig& c) { return c.domain; },
              [](ProblemConfig& c, const std::string& v) {
                  c.domain = one_of("kind", v, {"interval", "unit_square", "l_shape", "polygon"});
              }},
        RL_DOUBLE("domain", a),
        RL_DOUBLE("domain", b),
        Entry{"domain", "vertices",
              [](const ProblemConfig& c) {
                  std::string out;
                  for (std::size_t i = 0; i < c.polygon.size(); ++i) {
                      if (i) out += "; ";
                      out += fmt_double(c.polygon[i].x()) + " " + fmt_double(c.polygon[i].y());
                  }
                  return out;
              },
              [](ProblemConfig& c, const std::string& v) {
                  c.polygon.clear();
                  std::stringstream ss(v);
                  std::string item;
                  while (std::getline(ss, item, ';')) {
                      std::istringstream is(trim(item));
                      std::string xs, ys, extra;
                      if (!(is >> xs >> ys) || (is >> extra)) throw ConfigError("vertices: expected 'x y; x y; ...'");
                      c.polygon.emplace_back(parse_double("vertices", xs), parse_double("vertices", ys));
                  }
              }},
        RL_DOUBLE("domain", h),
        Entry{"domain", "mesher", [](const ProblemConfig& c) { return c.mesher; },
              [](ProblemConfig& c, const std::string& v) { c.mesher = one_of("mesher", v, {"structured", "delaunay"}); }},
        Entry{"coefficients", "family", [](const ProblemConfig& c) { return c.family; },
              [](ProblemConfig& c, const std::string& v) {
                  c.family = one_of("family", v,
                                    {"constant", "checkerboard", "sgn_drift", "custom_table", "linear_drift"});
              }},
        RL_DOUBLE("coefficients", a11),
        RL_DOUBLE("coefficients", a12),
        RL_DOUBLE("coefficients", a21),
        RL_DOUBLE("coefficients", a22),
        RL_DOUBLE("coefficients", b1),
        RL_DOUBLE("coefficients", b2),
        RL_DOUBLE("coefficients", c1),
        RL_DOUBLE("coefficients", c2),
        RL_DOUBLE("coefficients", d),
        RL_DOUBLE("coefficients", beta),
        RL_DOUBLE("coefficients", contrast),
        Entry{"coefficients", "tiles", [](const ProblemConfig& c) { return std::to_string(c.tiles); },
              [](ProblemConfig& c, const std::string& v) { c.tiles = parse_int("tiles", v); }},
        RL_DOUBLE("coefficients", gain),
        Entry{"coefficients", "table", [](const ProblemConfig& c) { return c.table; },
              [](ProblemConfig& c, const std::string& v) { c.table = v; }},
        Entry{"boundary", "model",
              [](const ProblemConfig& c) { return std::string(c.model == BoundaryModel::Robin ? "robin" : "wentzell"); },
              [](ProblemConfig& c, const std::string& v) {
                  c.model = one_of("model", v, {"robin", "wentzell"}) == "robin" ? BoundaryModel::Robin
                                                                                : BoundaryModel::Wentzell;
              }},
        Entry{"rhs", "f0", [](const ProblemConfig& c) { return c.f0; },
              [](ProblemConfig& c, const std::string& v) { c.f0 = one_of("f0", v, {"zero", "constant", "cos", "sign_split"}); }},
        RL_DOUBLE("rhs", f0_value),
        RL_DOUBLE("rhs", f1),
        RL_DOUBLE("rhs", f2),
        RL_DOUBLE("rhs", g),
        Entry{"shift", "policy", [](const ProblemConfig& c) { return c.omega_policy; },
              [](ProblemConfig& c, const std::string& v) { c.omega_policy = one_of("policy", v, {"fixed", "auto"}); }},
        RL_DOUBLE("shift", omega),
        RL_DOUBLE("shift", eta),
        Entry{"evolution", "scheme",
              [](const ProblemConfig& c) { return std::string(c.scheme == Scheme::ImplicitEuler ? "euler" : "cn"); },
              [](ProblemConfig& c, const std::string& v) {
                  c.scheme = one_of("scheme", v, {"euler", "cn"}) == "euler" ? Scheme::ImplicitEuler
                                                                             : Scheme::CrankNicolson;
              }},
        RL_DOUBLE("evolution", dt),
        RL_DOUBLE("evolution", t_end),
        Entry{"evolution", "lumped", [](const ProblemConfig& c) { return std::string(c.lumped ? "true" : "false"); },
              [](ProblemConfig& c, const std::string& v) { c.lumped = parse_bool("lumped", v); }},
    };
    return entries;
}

#undef RL_DOUBLE

}  // namespace

std::uint64_t fnv1a64(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

ProblemConfig ProblemConfig::parse(std::istream& in) {
    ProblemConfig cfg;
    std::map<std::string, const Entry*> index;
    std::set<std::string> sections;
    for (const auto& e : schema()) {
        index[std::string(e.section) + "." + e.key] = &e;
        sections.insert(e.section);
    }
    std::set<std::string> seen;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError(where + "malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
        if (section.empty()) throw ConfigError(where + "assignment outside of a section");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const std::string full = section + "." + key;
        const auto it = index.find(full);
        if (it == index.end()) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
        if (!seen.insert(full).second) throw ConfigError(where + "duplicate key '" + key + "'");
        try {
            it->second->set(cfg, value);
        } catch (const ConfigError& e) {
            throw ConfigError(where + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

ProblemConfig ProblemConfig::parse_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

ProblemConfig ProblemConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

std::string ProblemConfig::to_string() const {
    std::string out;
    std::string section;
    for (const auto& e : schema()) {
        if (section != e.section) {
            if (!section.empty()) out += "\n";
            section = e.section;
            out += "[" + section + "]\n";
        }
        out += std::string(e.key) + " = " + e.get(*this) + "\n";
    }
    return out;
}

std::uint64_t ProblemConfig::hash() const { return fnv1a64(to_string()); }

void ProblemConfig::validate() const {
    if (!(h > 0.0)) throw ConfigError("domain.h must be positive");
    if (domain == "interval" && !(a < b)) throw ConfigError("interval needs a < b");
    if (domain == "polygon") {
        if (polygon.size() < 3) throw ConfigError("polygon needs at least 3 vertices");
        if (!polygon_is_simple(polygon)) throw ConfigError("polygon is not simple");
    }
    if (domain != "interval" && family == "sgn_drift") throw ConfigError("sgn_drift is one-dimensional");
    if (domain == "interval" && (family == "checkerboard" || family == "custom_table" || family == "linear_drift")) {
        throw ConfigError("coefficient family '" + family + "' is two-dimensional");
    }
    if (family == "checkerboard" && (!(contrast >= 1.0) || tiles < 1)) {
        throw ConfigError("checkerboard needs contrast >= 1 and tiles >= 1");
    }
    if (family == "custom_table" && table.empty()) throw ConfigError("custom_table needs coefficients.table");
    if (!(eta > 0.0)) throw ConfigError("shift.eta must be positive");
    if (!(dt > 0.0) || !(t_end >= dt)) throw ConfigError("evolution needs dt > 0 and t_end >= dt");
}

int problem_dim(const ProblemConfig& cfg) { return cfg.domain == "interval" ? 1 : 2; }

Mesh build_problem_mesh(const ProblemConfig& cfg) {
    cfg.validate();
    if (cfg.domain == "interval") {
        const int n = std::max(1, static_cast<int>(std::lround((cfg.b - cfg.a) / cfg.h)));
        return build_interval_mesh(cfg.a, cfg.b, n);
    }
    if (cfg.domain == "unit_square" && cfg.mesher == "structured") {
        return build_unit_square_mesh(std::max(1, static_cast<int>(std::lround(1.0 / cfg.h))));
    }
    const Polygon poly = cfg.domain == "unit_square" ? unit_square() : cfg.domain == "l_shape" ? l_shape() : cfg.polygon;
    return build_polygon_mesh(poly, cfg.h);
}

CoefficientField build_problem_field(const ProblemConfig& cfg) {
    cfg.validate();
    const int dim = problem_dim(cfg);
    CoefficientField f;
    if (cfg.family == "constant") {
        Eigen::Matrix2d a;
        a << cfg.a11, cfg.a12, cfg.a21, cfg.a22;
        f = constant_coefficients(dim, a, Eigen::Vector2d(cfg.b1, cfg.b2), Eigen::Vector2d(cfg.c1, cfg.c2), cfg.d,
                                  cfg.beta);
    } else if (cfg.family == "checkerboard") {
        f = with_d(with_beta(checkerboard_coefficients(cfg.contrast, cfg.tiles), cfg.beta), cfg.d);
    } else if (cfg.family == "sgn_drift") {
        f = with_d(sgn_drift_coefficients(cfg.beta), cfg.d);
    } else if (cfg.family == "custom_table") {
        f = with_d(with_beta(custom_table_coefficients(load_value_table(cfg.table)), cfg.beta), cfg.d);
    } else {
        f = linear_drift_coefficients(cfg.gain, cfg.d, cfg.beta);
    }
    return f;
}

RhsData build_problem_rhs(const ProblemConfig& cfg) {
    RhsData r;
    const int dim = problem_dim(cfg);
    const double v = cfg.f0_value;
    if (cfg.f0 == "constant") {
        r.f0 = [v](const Point&) { return v; };
    } else if (cfg.f0 == "cos") {
        constexpr double pi = std::numbers::pi;
        if (dim == 1) {
            r.f0 = [](const Point& x) { return (1.0 + pi * pi) * std::cos(pi * x.x()); };
        } else {
            r.f0 = [](const Point& x) { return (1.0 + 2.0 * pi * pi) * std::cos(pi * x.x()) * std::cos(pi * x.y()); };
        }
    } else if (cfg.f0 == "sign_split") {
        r.f0 = [v](const Point& x) { return x.x() < 0.5 ? v : -v; };
    }
    if (cfg.f1 != 0.0 || cfg.f2 != 0.0) {
        const Eigen::Vector2d fj(cfg.f1, dim == 1 ? 0.0 : cfg.f2);
        r.f = [fj](const Point&) { return fj; };
    }
    if (cfg.g != 0.0) {
        const double g = cfg.g;
        r.g = [g](const Point&) { return g; };
    }
    return r;
}

EvolutionConfig build_evolution_config(const ProblemConfig& cfg) {
    EvolutionConfig e;
    e.scheme = cfg.scheme;
    e.dt = cfg.dt;
    e.t_end = cfg.t_end;
    e.model = cfg.model;
    e.lumped = cfg.lumped;
    e.omega = cfg.omega;
    return e;
}

}  // namespace robinlab
