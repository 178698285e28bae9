// cdem command-line front end: run, baseline, grid, selftest, synth.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "acceptance.hpp"
#include "cdem/bench.hpp"
#include "cdem/errors.hpp"
#include "cdem/synth.hpp"

namespace {

using namespace cdem;

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> tasks;
    std::vector<std::string> overrides;
    std::string out;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "key=value experiment config")->required()->check(CLI::ExistingFile);
    cmd->add_option("--task", args.tasks, "registry task such as C-A (repeatable; default: config tasks)");
    cmd->add_option("--set", args.overrides, "override a config key, e.g. --set beta=1")->take_all();
    cmd->add_option("--out", args.out, "output directory (default: config out_dir, else ./cdem_out)");
}

ExperimentConfig load_with_overrides(const CommonArgs& args) {
    auto config = load_config(args.config_path);
    for (const auto& kv : args.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
        set_config_value(config, kv.substr(0, eq), kv.substr(eq + 1), std::filesystem::current_path());
    }
    if (!args.out.empty()) config.out_dir = args.out;
    if (config.out_dir.empty()) config.out_dir = "cdem_out";
    return config;
}

/// One config per task: the named registry tasks, the config's task list, or the config itself.
std::vector<ExperimentConfig> task_configs(const ExperimentConfig& config, const std::vector<std::string>& names) {
    const auto& list = names.empty() ? config.tasks : names;
    if (list.empty()) return {config};
    std::vector<ExperimentConfig> out;
    for (const auto& name : list) out.push_back(config.for_task(name));
    return out;
}

struct LoadedTask {
    ExperimentConfig config;
    DomainPair pair;
    std::optional<LabelVector> target_labels;
};

LoadedTask load_task(const ExperimentConfig& config) {
    auto pair = load_domain_pair(config);
    auto labels = load_target_labels(config, pair.num_classes());
    return LoadedTask{config, std::move(pair), std::move(labels)};
}

std::vector<TaskResult> run_tasks(const std::vector<ExperimentConfig>& configs,
                                  const std::function<std::vector<TaskResult>(const LoadedTask&)>& job) {
    std::vector<std::vector<TaskResult>> per_task(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) { per_task[i] = job(load_task(configs[i])); });
    std::vector<TaskResult> flat;
    for (auto& r : per_task) flat.insert(flat.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    return flat;
}

void finish(const std::vector<TaskResult>& results, const std::string& dir) {
    emit_report(results, dir);
    std::cout << results_csv(results);
    std::cerr << "report written to " << dir << "\n";
}

int exit_code(const Error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const FormatError*>(&e) || dynamic_cast<const DataError*>(&e) ||
        dynamic_cast<const IoError*>(&e)) {
        return 3;
    }
    if (dynamic_cast<const NumericError*>(&e)) return 4;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross-domain error minimization for unsupervised domain adaptation"};
    app.require_subcommand(1);

    CommonArgs run_args;
    std::vector<std::string> ablation;
    bool suite = false;
    bool with_baseline = false;
    std::optional<std::uint64_t> seed;
    std::string dump_dir;
    auto* run = app.add_subcommand("run", "adapt each task and write a report");
    add_common(run, run_args);
    run->add_option("--ablation", ablation, "objective components to enable: erm, da, cde, dfl (default all)")
        ->delimiter(',');
    run->add_flag("--suite", suite, "run the four ablation settings instead of one configuration");
    run->add_flag("--with-baseline", with_baseline, "also report the source-only baseline");
    run->add_option("--seed", seed, "seed recorded with the run");
    run->add_option("--dump-dir", dump_dir, "write per-iteration A, B, Omega, P, Theta matrices here");

    CommonArgs base_args;
    auto* baseline = app.add_subcommand("baseline", "source-only prototype classifier");
    add_common(baseline, base_args);

    CommonArgs grid_args;
    std::vector<std::string> params;
    auto* grid = app.add_subcommand("grid", "sweep hyperparameters over {1e-4, 1e-3, 1e-2, 0.1, 1, 10}");
    add_common(grid, grid_args);
    grid->add_option("--param", params, "comma list of beta, lambda, gamma, eta")->required()->delimiter(',');

    auto* selftest = app.add_subcommand("selftest", "run the oracle and acceptance checks");

    std::string spec_path;
    std::string synth_out;
    std::uint64_t synth_seed = 0;
    auto* synth = app.add_subcommand("synth", "write a synthetic domain-shift task");
    synth->add_option("--spec", spec_path, "shift spec file (default: the standard two-class shift)")
        ->check(CLI::ExistingFile);
    synth->add_option("--seed", synth_seed, "seed for the standard spec");
    synth->add_option("--out", synth_out, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            auto config = load_with_overrides(run_args);
            if (!ablation.empty()) {
                std::string list;
                for (const auto& a : ablation) list += (list.empty() ? "" : ",") + a;
                config.components = ComponentFlags::parse(list);
            }
            if (seed) config.seed = *seed;
            if (!dump_dir.empty()) config.dump_dir = dump_dir;
            const auto configs = task_configs(config, run_args.tasks);
            const auto results = run_tasks(configs, [&](const LoadedTask& t) {
                std::vector<TaskResult> out;
                if (with_baseline) out.push_back(run_baseline_source_only(t.pair, t.config, t.target_labels));
                if (suite) {
                    auto s = run_ablation_suite(t.pair, t.config, t.target_labels);
                    out.insert(out.end(), s.begin(), s.end());
                } else {
                    out.push_back(run_cdem_task(t.pair, t.config, t.target_labels));
                }
                return out;
            });
            finish(results, config.out_dir);
        } else if (*baseline) {
            const auto config = load_with_overrides(base_args);
            const auto results = run_tasks(task_configs(config, base_args.tasks), [](const LoadedTask& t) {
                return std::vector<TaskResult>{run_baseline_source_only(t.pair, t.config, t.target_labels)};
            });
            finish(results, config.out_dir);
        } else if (*grid) {
            const auto config = load_with_overrides(grid_args);
            std::string csv = "task";
            for (const auto& p : params) csv += "," + p;
            csv += ",accuracy\n";
            for (const auto& tc : task_configs(config, grid_args.tasks)) {
                const auto t = load_task(tc);
                if (!t.target_labels) throw ConfigError("grid search needs target_labels for " + tc.task_name);
                for (const auto& point : grid_search(t.pair, t.config, *t.target_labels, params)) {
                    csv += tc.task_name;
                    for (const auto& p : params) {
                        const double v = p == "beta" ? point.hp.beta
                                         : p == "lambda" ? point.hp.lambda
                                         : p == "gamma" ? point.hp.gamma
                                                        : point.hp.eta;
                        char buf[32];
                        std::snprintf(buf, sizeof(buf), ",%g", v);
                        csv += buf;
                    }
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), ",%.1f\n", point.accuracy);
                    csv += buf;
                }
            }
            std::filesystem::create_directories(config.out_dir);
            std::ofstream out(std::filesystem::path(config.out_dir) / "grid.csv");
            out << csv;
            if (!out) throw IoError("cannot write grid.csv in " + config.out_dir);
            std::cout << csv;
        } else if (*selftest) {
            using namespace cdem::acceptance;
            const auto results =
                run_all([](const CriterionResult& r) { std::cout << format_line(r) << std::endl; });
            return all_passed(results) ? 0 : 1;
        } else if (*synth) {
            auto spec = spec_path.empty() ? standard_shift_spec(synth_seed) : load_shift_spec(spec_path);
            write_synthetic(generate(spec), synth_out);
            std::cerr << "synthetic task written to " << synth_out << "\n";
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    }
    return 0;
}
