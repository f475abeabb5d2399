// cvsense: curves, Monte Carlo campaigns, allocation and Fisher-information reports for
// continuous-variable distributed displacement and phase sensing.

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

#include "cvsense/cli/commands.hpp"
#include "cvsense/error.hpp"
#include "cvsense/execution.hpp"

namespace cli = cvsense::cli;

namespace {

struct Invocation {
    const cli::Command* command = nullptr;
    std::string config;
    std::string out;
    std::map<std::string, std::string> flags;
};

void print_summary(const cli::RunRecord& rec) {
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << '\n';
    for (const auto& o : rec.outputs) std::cerr << "wrote " << o.string() << '\n';
    std::cerr << "wrote " << cli::manifest_path_for(rec.outputs.front()).string() << '\n';
    if (rec.exit_code == cli::kExitValidation) std::cerr << "validation FAILED (see status column)\n";
}

int run(int argc, char** argv) {
    CLI::App app{"Continuous-variable distributed quantum sensing simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", CVSENSE_VERSION);

    // Flag values are captured as text and parsed by the same converter as config files.
    std::vector<Invocation> invocations(cli::commands().size());
    std::vector<std::map<std::string, std::string>> raw(cli::commands().size());
    for (std::size_t i = 0; i < cli::commands().size(); ++i) {
        const auto& command = cli::commands()[i];
        auto* sub = app.add_subcommand(command.name, command.summary);
        invocations[i].command = &command;
        sub->add_option("--config", invocations[i].config, "key = value parameter file")->check(CLI::ExistingFile);
        sub->add_option("--out", invocations[i].out, "output CSV; a .manifest.json is written next to it")
            ->required();
        for (const auto& spec : command.schema) {
            std::string help = spec.help;
            if (!spec.fallback.is_null()) help += " [default " + spec.fallback.dump() + "]";
            sub->add_option_function<std::string>(
                "--" + cli::flag_name(spec), [&flags = raw[i], key = spec.key](const std::string& v) { flags[key] = v; },
                help + " (config key: " + spec.key + ")");
        }
    }

    std::string manifest;
    std::string replay_dir = "replay";
    auto* replay = app.add_subcommand("replay", "re-run a manifest and compare output checksums");
    replay->add_option("--manifest", manifest, "manifest JSON")->required()->check(CLI::ExistingFile);
    replay->add_option("--out", replay_dir, "directory for the regenerated files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? cli::kExitSuccess : cli::kExitUsage;
    }

    cvsense::configure_threads_from_env();

    if (replay->parsed()) {
        const auto result = cli::replay(manifest, replay_dir);
        for (const auto& m : result.mismatches) std::cerr << "mismatch: " << m << '\n';
        std::cerr << (result.ok() ? "replay matches " : "replay DIFFERS from ") << manifest << '\n';
        return result.ok() ? cli::kExitSuccess : cli::kExitValidation;
    }

    for (std::size_t i = 0; i < invocations.size(); ++i) {
        auto& inv = invocations[i];
        if (!app.get_subcommand(inv.command->name)->parsed()) continue;
        std::optional<cli::ConfigFile> config;
        if (!inv.config.empty()) config = cli::load_config(inv.config);
        const auto params = cli::resolve_params(inv.command->schema, config ? &*config : nullptr, raw[i]);
        const auto rec = cli::execute(*inv.command, params, inv.out);
        print_summary(rec);
        return rec.exit_code;
    }
    return cli::kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const cli::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const cvsense::DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    } catch (const cvsense::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitSolver;
    } catch (const cvsense::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return cli::kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::kExitUsage;
    }
}
