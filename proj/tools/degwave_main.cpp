#include <string>

#include "CLI11.hpp"
#include "degwave/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Interior-degenerate wave equation laboratory"};
    app.require_subcommand(1);

    const char* names[] = {"solve",         "hardy", "carleman-scan",
                           "observability", "hum",   "steer",
                           "validate"};
    const char* descriptions[] = {
        "forward solve with trajectory, energy and boundary-trace output",
        "weighted Hardy-quotient suite (2D)",
        "Carleman ratio table over (s, gamma)",
        "seeded observability ratios and unique-continuation probe",
        "exact control synthesis by the duality iteration",
        "general steering to a nonzero target",
        "dry-run validation of every config invariant"};

    std::string config_path;
    std::string output_override;
    for (int i = 0; i < 7; ++i) {
        auto* sub = app.add_subcommand(names[i], descriptions[i]);
        sub->add_option("config", config_path, "scenario config file")->required();
        sub->add_option("--output-dir", output_override,
                        "override the configured output directory");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    return degwave::cli::run(app.get_subcommands().front()->get_name(),
                             config_path, output_override);
}
