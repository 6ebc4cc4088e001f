#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "degwave/carleman.hpp"
#include "degwave/geometry.hpp"
#include "degwave/spaces.hpp"

namespace degwave {

/// Flat sectioned key=value configuration text. Keys are addressed as
/// "section.key"; values are scalars, words, or space-separated lists.
class ConfigText {
public:
    static ConfigText parse_file(const std::string& path);
    static ConfigText parse_string(const std::string& text);

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key, const std::string& fallback) const;
    std::string require_string(const std::string& key) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_list(const std::string& key,
                                 const std::vector<double>& fallback) const;

private:
    std::map<std::string, std::string> values_;
};

/// Everything a run needs, read from one config file. "auto" entries are
/// resolved against the geometry when the scenario is built.
struct Scenario {
    Domain domain;
    int cells = 200;

    bool delta_auto = true;
    double delta = 0.0;
    bool epsilon_auto = true;
    double epsilon = 0.0;
    bool include_origin = true;

    bool t_auto = true;
    double T = 0.0;
    bool dt_auto = true;
    double dt = 0.0;
    double safety = 0.9;
    int export_stride = 0;  ///< 0 resolves to about 200 exported rows

    std::vector<double> s_list{10.0, 20.0, 40.0};
    std::vector<double> gamma_list{2.0};
    bool beta_auto = true;
    double beta = 0.0;
    bool t0_auto = true;
    double t0 = 0.0;
    double beta0 = 0.0;

    double tol = 1e-5;
    int max_iter = 500;
    std::string initial_u = "zero";
    std::string initial_v = "zero";
    std::string target_u = "zero";
    std::string target_v = "zero";

    int samples = 100;
    double threshold = 1.0;
    int n_modes = 10;

    std::uint64_t seed = 42;
    std::string output_dir = "out";
};

Scenario load_scenario(const std::string& config_path);

/// The scenario with geometry built and every "auto" entry pinned.
struct ResolvedScenario {
    Scenario raw;
    std::shared_ptr<const Grid> grid;
    std::shared_ptr<const ControlRegion> omega;
    double T = 0.0;
    double dt = 0.0;
    int export_stride = 1;
    CarlemanParams carleman;
};

ResolvedScenario resolve_scenario(const Scenario& s);

/// Dry-run validation of every invariant the scenario touches; returns one
/// message per violation, empty when clean. Non-fatal oddities (a control
/// region covering all of the domain) come back in `warnings`.
std::vector<std::string> validate_scenario(const Scenario& s,
                                           std::vector<std::string>* warnings = nullptr);

/// Field specs: "zero", "bump" (a Gaussian bump vanishing on the boundary),
/// or "modes c1 c2 ..." with coefficients on the lowest reference modes.
ScalarField parse_field_spec(const std::string& spec,
                             std::shared_ptr<const Grid> grid);

/// Round-trippable config text for the geometry sections.
std::string domain_to_config(const Domain& domain, int cells);
std::string region_to_config(const ControlRegion& region);

}  // namespace degwave
