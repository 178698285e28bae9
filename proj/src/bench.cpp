#include "cdem/bench.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "cdem/errors.hpp"
#include "cdem/prototype.hpp"

namespace cdem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string one_decimal(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f", v);
    return buf;
}

Embedding make_embedding(const Eigen::MatrixXd& zs, std::span<const int> ys, const Eigen::MatrixXd& zt,
                         std::span<const int> yt) {
    const Eigen::Index cols = std::min<Eigen::Index>(2, zs.cols());
    Embedding e;
    e.coords = Eigen::MatrixXd::Zero(zs.rows() + zt.rows(), 2);
    e.coords.topLeftCorner(zs.rows(), cols) = zs.leftCols(cols);
    e.coords.bottomLeftCorner(zt.rows(), cols) = zt.leftCols(cols);
    e.domain.assign(static_cast<std::size_t>(zs.rows()), 0);
    e.domain.resize(static_cast<std::size_t>(zs.rows() + zt.rows()), 1);
    e.label.assign(ys.begin(), ys.end());
    e.label.insert(e.label.end(), yt.begin(), yt.end());
    return e;
}

nlohmann::json errors_json(const CrossDomainErrors& e) {
    return {{"eps_s_fs", e.source_by_source},
            {"eps_t_ft", e.target_by_target},
            {"eps_s_ft", e.source_by_target},
            {"eps_t_fs", e.target_by_source}};
}

nlohmann::json record_json(const IterationRecord& r) {
    nlohmann::json j{{"t", r.t},
                     {"objective", r.objective},
                     {"eig_residual", r.eig_residual},
                     {"selected_per_class", r.selected_per_class},
                     {"selected_total", r.selected_total},
                     {"consistent_total", r.consistent_total},
                     {"label_agreement", r.label_agreement},
                     {"kmeans_iterations", r.kmeans_iterations},
                     {"skipped_terms", r.skipped_terms},
                     {"pseudo_errors", errors_json(r.pseudo_errors)}};
    j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
    j["errors"] = r.errors ? errors_json(*r.errors) : nlohmann::json(nullptr);
    return j;
}

std::string safe_name(std::string s) {
    for (auto& ch : s) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_') ch = '_';
    }
    return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

TaskResult run_baseline_source_only(const DomainPair& pair, const ExperimentConfig& config,
                                    const std::optional<LabelVector>& target_labels) {
    const auto start = Clock::now();
    const auto prep = prepare_features(pair, config);
    const auto protos = fit_prototypes(prep.source, pair.source_labels.values(), pair.num_classes());
    TaskResult r;
    r.task = config.task_name;
    r.method = "source_only";
    r.predictions = nearest_prototype(protos.centers, prep.target);
    if (target_labels) r.accuracy = accuracy_percent(r.predictions, target_labels->values());
    r.embedding = make_embedding(prep.source, pair.source_labels.values(), prep.target, r.predictions);
    r.wall_time_s = seconds_since(start);
    return r;
}

TaskResult run_cdem_task(const DomainPair& pair, const ExperimentConfig& config,
                         const std::optional<LabelVector>& target_labels, const std::string& method) {
    const auto start = Clock::now();
    IterationObserver observer;
    if (target_labels) {
        const auto& yt = target_labels->values();
        const auto& ys = pair.source_labels.values();
        const int num_classes = pair.num_classes();
        observer = [&yt, &ys, num_classes](const IterationView& view, IterationRecord& record) {
            record.accuracy = accuracy_percent(view.labels.y, yt);
            record.errors =
                evaluate_cross_domain_errors(view.projected_source, ys, view.projected_target, yt, num_classes);
        };
    }
    const auto adapted = run_cdem(pair, config, observer);
    TaskResult r;
    r.task = config.task_name;
    r.method = method;
    r.predictions = adapted.predictions;
    if (target_labels) r.accuracy = accuracy_percent(r.predictions, target_labels->values());
    r.trace = adapted.iterations;
    r.embedding = make_embedding(adapted.projected_source, pair.source_labels.values(), adapted.projected_target,
                                 adapted.predictions);
    r.wall_time_s = seconds_since(start);
    return r;
}

std::vector<ComponentFlags> ablation_settings() {
    return {ComponentFlags{true, false, false, false}, ComponentFlags{true, true, false, false},
            ComponentFlags{true, true, true, false}, ComponentFlags{true, true, true, true}};
}

std::vector<TaskResult> run_ablation_suite(const DomainPair& pair, const ExperimentConfig& config,
                                           const std::optional<LabelVector>& target_labels) {
    const auto settings = ablation_settings();
    std::vector<TaskResult> out(settings.size());
    parallel_for(settings.size(), [&](std::size_t i) {
        ExperimentConfig c = config;
        c.components = settings[i];
        out[i] = run_cdem_task(pair, c, target_labels, settings[i].to_string());
    });
    return out;
}

unsigned task_threads() {
    if (const char* env = std::getenv("CDEM_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& job) {
    const auto workers = std::min<std::size_t>(task_threads(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) job(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

std::string results_csv(const std::vector<TaskResult>& results) {
    std::string csv = "task,method,accuracy\n";
    std::vector<std::string> method_order;
    std::map<std::string, std::vector<double>> by_method;
    for (const auto& r : results) {
        csv += r.task + "," + r.method + "," + (r.accuracy ? one_decimal(*r.accuracy) : "") + "\n";
        if (!by_method.contains(r.method)) method_order.push_back(r.method);
        if (r.accuracy) by_method[r.method].push_back(*r.accuracy);
        else by_method[r.method];
    }
    for (const auto& method : method_order) {
        const auto& values = by_method[method];
        if (values.size() < 2) continue;
        double sum = 0.0;
        for (double v : values) sum += v;
        csv += "Avg," + method + "," + one_decimal(sum / static_cast<double>(values.size())) + "\n";
    }
    return csv;
}

void emit_report(const std::vector<TaskResult>& results, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_text(dir / "results.csv", results_csv(results));

    nlohmann::json report = nlohmann::json::object();
    report["results"] = nlohmann::json::array();
    std::map<std::string, std::pair<double, int>> sums;
    std::string timing = "task,method,wall_time_s\n";
    for (const auto& r : results) {
        nlohmann::json j{{"task", r.task}, {"method", r.method}};
        j["accuracy"] = r.accuracy ? nlohmann::json(*r.accuracy) : nlohmann::json(nullptr);
        j["predictions"] = r.predictions;
        j["trace"] = nlohmann::json::array();
        for (const auto& rec : r.trace) j["trace"].push_back(record_json(rec));
        report["results"].push_back(std::move(j));
        if (r.accuracy) {
            sums[r.method].first += *r.accuracy;
            sums[r.method].second += 1;
        }
        timing += r.task + "," + r.method + "," + std::to_string(r.wall_time_s) + "\n";

        if (r.embedding) {
            std::string csv = "x,y,domain,label\n";
            const auto& e = *r.embedding;
            for (Eigen::Index i = 0; i < e.coords.rows(); ++i) {
                char buf[96];
                std::snprintf(buf, sizeof(buf), "%.17g,%.17g,", e.coords(i, 0), e.coords(i, 1));
                csv += buf;
                csv += (e.domain[static_cast<std::size_t>(i)] == 0 ? "source," : "target,");
                csv += std::to_string(e.label[static_cast<std::size_t>(i)]) + "\n";
            }
            write_text(dir / ("embedding_" + safe_name(r.task) + "_" + safe_name(r.method) + ".csv"), csv);
        }
    }
    nlohmann::json averages = nlohmann::json::object();
    for (const auto& [method, acc] : sums) {
        if (acc.second >= 2) averages[method] = acc.first / acc.second;
    }
    report["averages"] = averages;
    write_text(dir / "report.json", report.dump(2) + "\n");
    write_text(dir / "timing.csv", timing);
}

const std::vector<double>& grid_values() {
    static const std::vector<double> values{0.0001, 0.001, 0.01, 0.1, 1.0, 10.0};
    return values;
}

std::vector<GridPoint> grid_search(const DomainPair& pair, const ExperimentConfig& config,
                                   const LabelVector& target_labels, const std::vector<std::string>& params) {
    std::vector<double Hyperparams::*> fields;
    for (const auto& p : params) {
        if (p == "beta") fields.push_back(&Hyperparams::beta);
        else if (p == "lambda") fields.push_back(&Hyperparams::lambda);
        else if (p == "gamma") fields.push_back(&Hyperparams::gamma);
        else if (p == "eta") fields.push_back(&Hyperparams::eta);
        else throw ConfigError("grid search cannot sweep '" + p + "'");
    }
    const auto& values = grid_values();
    std::size_t total = 1;
    for (std::size_t i = 0; i < fields.size(); ++i) total *= values.size();

    std::vector<GridPoint> points(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        points[idx].hp = config.hp;
        std::size_t rest = idx;
        for (auto field : fields) {
            points[idx].hp.*field = values[rest % values.size()];
            rest /= values.size();
        }
    }
    const std::optional<LabelVector> labels = target_labels;
    parallel_for(total, [&](std::size_t idx) {
        ExperimentConfig c = config;
        c.hp = points[idx].hp;
        points[idx].accuracy = *run_cdem_task(pair, c, labels).accuracy;
    });
    return points;
}

}  // namespace cdem
