#include "degwave/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "degwave/errors.hpp"
#include "degwave/io.hpp"
#include "degwave/wavesolver.hpp"

namespace degwave {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
}

double parse_double(const std::string& key, const std::string& text) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ValidationError(key, "cannot parse '" + text + "' as a number");
    }
}

}  // namespace

ConfigText ConfigText::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config", "cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str());
}

ConfigText ConfigText::parse_string(const std::string& text) {
    ConfigText cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config", "malformed section header at line " +
                                                    std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config", "expected key = value at line " +
                                                std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        cfg.values_[section.empty() ? key : section + "." + key] = value;
    }
    return cfg;
}

bool ConfigText::has(const std::string& key) const { return values_.count(key) > 0; }

std::string ConfigText::get_string(const std::string& key,
                                   const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string ConfigText::require_string(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ValidationError(key, "missing required key");
    return it->second;
}

double ConfigText::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : parse_double(key, it->second);
}

bool ConfigText::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw ValidationError(key, "expected true or false, got '" + it->second + "'");
}

int ConfigText::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    const double v = parse_double(key, it->second);
    if (v != std::floor(v)) throw ValidationError(key, "expected an integer");
    return static_cast<int>(v);
}

std::vector<double> ConfigText::get_list(const std::string& key,
                                         const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& w : split_words(it->second)) out.push_back(parse_double(key, w));
    return out;
}

Scenario load_scenario(const std::string& config_path) {
    const ConfigText cfg = ConfigText::parse_file(config_path);
    Scenario s;

    s.domain.dim = cfg.get_int("domain.dim", 1);
    const auto bounds = cfg.get_list("domain.bounds", {-1.0, 1.0});
    if (static_cast<int>(bounds.size()) != 2 * s.domain.dim)
        throw ValidationError("domain.bounds",
                              "expected " + std::to_string(2 * s.domain.dim) +
                                  " numbers (a b per axis)");
    for (int d = 0; d < s.domain.dim; ++d)
        s.domain.bounds[d] = {bounds[2 * d], bounds[2 * d + 1]};
    s.domain.alpha = cfg.get_double("domain.alpha", 0.0);
    s.cells = cfg.get_int("grid.cells_per_axis", 200);

    if (cfg.has("region.delta")) {
        s.delta_auto = false;
        s.delta = cfg.get_double("region.delta", 0.0);
    }
    if (cfg.has("region.epsilon")) {
        s.epsilon_auto = false;
        s.epsilon = cfg.get_double("region.epsilon", 0.0);
    }
    s.include_origin = cfg.get_bool("region.include_origin", true);

    const std::string t_str = cfg.get_string("time.T", "auto");
    if (t_str != "auto") {
        s.t_auto = false;
        s.T = parse_double("time.T", t_str);
    }
    const std::string dt_str = cfg.get_string("time.dt", "auto");
    if (dt_str != "auto") {
        s.dt_auto = false;
        s.dt = parse_double("time.dt", dt_str);
    }
    s.safety = cfg.get_double("time.safety", 0.9);
    s.export_stride = cfg.get_int("time.export_stride", 0);

    s.s_list = cfg.get_list("carleman.s_list", s.s_list);
    s.gamma_list = cfg.get_list("carleman.gamma_list", s.gamma_list);
    const std::string beta_str = cfg.get_string("carleman.beta", "auto");
    if (beta_str != "auto") {
        s.beta_auto = false;
        s.beta = parse_double("carleman.beta", beta_str);
    }
    const std::string t0_str = cfg.get_string("carleman.t0", "auto");
    if (t0_str != "auto") {
        s.t0_auto = false;
        s.t0 = parse_double("carleman.t0", t0_str);
    }
    s.beta0 = cfg.get_double("carleman.beta0", 0.0);

    s.tol = cfg.get_double("hum.tol", s.tol);
    s.max_iter = cfg.get_int("hum.max_iter", s.max_iter);
    s.initial_u = cfg.get_string("hum.initial_u", s.initial_u);
    s.initial_v = cfg.get_string("hum.initial_v", s.initial_v);
    s.target_u = cfg.get_string("hum.target_u", s.target_u);
    s.target_v = cfg.get_string("hum.target_v", s.target_v);

    s.samples = cfg.get_int("observability.samples", s.samples);
    s.threshold = cfg.get_double("observability.threshold", s.threshold);
    s.n_modes = cfg.get_int("observability.modes", s.n_modes);

    const double seed = cfg.get_double("run.seed", 42.0);
    s.seed = static_cast<std::uint64_t>(seed);
    s.output_dir = cfg.get_string("run.output_dir", s.output_dir);
    return s;
}

namespace {

void resolve_region_defaults(const Scenario& s, const Grid& grid, double& delta,
                             double& epsilon) {
    // Defaults resolve the collar and the origin ball at any resolution:
    // delta spans three cells and epsilon five.
    double h = grid.spacing(0);
    if (grid.dim() == 2) h = std::max(h, grid.spacing(1));
    delta = s.delta_auto ? 3.0 * h : s.delta;
    epsilon = s.epsilon_auto ? 5.0 * h : s.epsilon;
}

}  // namespace

ResolvedScenario resolve_scenario(const Scenario& s) {
    ResolvedScenario r;
    r.raw = s;
    r.grid = std::make_shared<Grid>(s.domain, s.cells);

    double delta = 0.0, epsilon = 0.0;
    resolve_region_defaults(s, *r.grid, delta, epsilon);
    r.omega = std::make_shared<ControlRegion>(
        build_control_region(r.grid, delta, epsilon, s.include_origin));

    r.T = s.t_auto ? minimal_time(s.domain, epsilon, delta) : s.T;
    r.dt = s.dt_auto ? cfl_timestep(*r.grid, s.safety) : s.dt;

    r.carleman = default_params(s.domain, r.T, epsilon, delta);
    if (!s.beta_auto) r.carleman.beta = s.beta;
    if (!s.t0_auto) r.carleman.t0 = s.t0;
    r.carleman.beta0 = s.beta0;

    const int n_steps = static_cast<int>(std::ceil(r.T / r.dt - 1e-9));
    r.export_stride = s.export_stride > 0
                          ? s.export_stride
                          : std::max(1, n_steps / 200);
    return r;
}

std::vector<std::string> validate_scenario(const Scenario& s,
                                           std::vector<std::string>* warnings) {
    std::vector<std::string> out;
    auto attempt = [&](const auto& fn) {
        try {
            fn();
        } catch (const ValidationError& e) {
            out.push_back(e.what());
        }
    };

    attempt([&] { s.domain.validate(); });
    std::shared_ptr<const Grid> grid;
    attempt([&] { grid = std::make_shared<Grid>(s.domain, s.cells); });
    if (!grid) return out;

    double delta = 0.0, epsilon = 0.0;
    resolve_region_defaults(s, *grid, delta, epsilon);
    std::shared_ptr<const ControlRegion> omega;
    attempt([&] {
        auto region = build_control_region(grid, delta, epsilon, s.include_origin);
        if (region.covers_domain && warnings)
            warnings->push_back(
                "region: the control region covers the whole domain");
        omega = std::make_shared<ControlRegion>(std::move(region));
    });

    attempt([&] {
        if (!(s.safety > 0.0 && s.safety <= 1.0))
            throw ValidationError("time.safety", "must lie in (0, 1]");
    });

    double T = 0.0;
    attempt([&] {
        const double t_min = minimal_time(s.domain, epsilon, delta);
        T = s.t_auto ? t_min : s.T;
        if (!s.t_auto && s.T < t_min * (1.0 - 1e-12))
            throw ValidationError("time.T",
                                  "horizon below the minimal control time " +
                                      format_double(t_min) +
                                      " for this (epsilon, delta)");
    });
    attempt([&] {
        if (!s.dt_auto) {
            const double dt_max = cfl_timestep(*grid, s.safety);
            if (s.dt > dt_max * (1.0 + 1e-12))
                throw ValidationError("time.dt",
                                      "exceeds the stability bound " +
                                          format_double(dt_max));
        }
    });

    if (T > 0.0) {
        attempt([&] {
            CarlemanParams p = default_params(s.domain, T, epsilon, delta);
            if (!s.beta_auto) p.beta = s.beta;
            if (!s.t0_auto) p.t0 = s.t0;
            p.beta0 = s.beta0;
            for (const auto& v : p.violations(s.domain, T, true))
                out.push_back(v);
            for (double sv : s.s_list)
                if (!(sv >= 1.0))
                    throw ValidationError("carleman.s_list", "entries must be >= 1");
            for (double gv : s.gamma_list)
                if (!(gv >= 1.0))
                    throw ValidationError("carleman.gamma_list",
                                          "entries must be >= 1");
        });
    }

    attempt([&] {
        if (!(s.tol > 0.0)) throw ValidationError("hum.tol", "must be positive");
        if (s.max_iter < 1) throw ValidationError("hum.max_iter", "must be >= 1");
        parse_field_spec(s.initial_u, grid);
        parse_field_spec(s.initial_v, grid);
        parse_field_spec(s.target_u, grid);
        parse_field_spec(s.target_v, grid);
    });
    attempt([&] {
        if (s.samples < 1)
            throw ValidationError("observability.samples", "must be >= 1");
        if (!(s.threshold > 0.0))
            throw ValidationError("observability.threshold", "must be positive");
    });
    return out;
}

ScalarField parse_field_spec(const std::string& spec,
                             std::shared_ptr<const Grid> grid) {
    const auto words = split_words(spec);
    if (words.empty())
        throw ValidationError("field", "empty field spec");
    const Domain dom = grid->domain();
    if (words[0] == "zero") return zero_field(grid);
    if (words[0] == "bump") {
        // Gaussian bump flattened to zero on the boundary.
        return make_field(grid, [dom](const Point& p) {
            const double r = point_norm(dom, p);
            double v = std::exp(-20.0 * r * r);
            for (int d = 0; d < dom.dim; ++d) {
                const double mid = 0.5 * (dom.bounds[d][0] + dom.bounds[d][1]);
                const double xi = (p[d] - mid) / (0.5 * dom.length(d));
                v *= 1.0 - xi * xi;
            }
            return v;
        });
    }
    if (words[0] == "modes") {
        std::vector<double> coeffs;
        for (std::size_t i = 1; i < words.size(); ++i)
            coeffs.push_back(parse_double("field.modes", words[i]));
        if (coeffs.empty())
            throw ValidationError("field", "modes spec needs coefficients");
        const auto modes = lowest_modes(dom, static_cast<int>(coeffs.size()));
        ScalarField f = zero_field(grid);
        for (std::size_t i = 0; i < coeffs.size(); ++i) {
            if (coeffs[i] == 0.0) continue;
            axpy(f, coeffs[i], mode_field(grid, modes[i]));
        }
        return f;
    }
    throw ValidationError("field", "unknown field spec '" + words[0] +
                                       "' (expected zero, bump, or modes ...)");
}

std::string domain_to_config(const Domain& domain, int cells) {
    std::string out = "[domain]\n";
    out += "dim = " + std::to_string(domain.dim) + "\n";
    out += "bounds =";
    for (int d = 0; d < domain.dim; ++d)
        out += " " + format_double(domain.bounds[d][0]) + " " +
               format_double(domain.bounds[d][1]);
    out += "\nalpha = " + format_double(domain.alpha) + "\n";
    out += "\n[grid]\ncells_per_axis = " + std::to_string(cells) + "\n";
    return out;
}

std::string region_to_config(const ControlRegion& region) {
    std::string out = "[region]\n";
    out += "delta = " + format_double(region.delta) + "\n";
    out += "epsilon = " + format_double(region.epsilon) + "\n";
    out += std::string("include_origin = ") +
           (region.contains_origin ? "true" : "false") + "\n";
    return out;
}

}  // namespace degwave
