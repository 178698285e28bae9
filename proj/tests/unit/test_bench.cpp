#include <doctest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cdem/bench.hpp"
#include "cdem/errors.hpp"
#include "cdem/synth.hpp"
#include "scratch_dir.hpp"

using namespace cdem;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    for (std::string line; std::getline(ss, line);) out.push_back(line);
    return out;
}

TaskResult row(const std::string& task, const std::string& method, std::optional<double> acc) {
    TaskResult r;
    r.task = task;
    r.method = method;
    r.accuracy = acc;
    return r;
}

}  // namespace

TEST_CASE("empty results give a header-only csv") {
    CHECK(results_csv({}) == "task,method,accuracy\n");
}

TEST_CASE("one result, one decimal") {
    CHECK(results_csv({row("C-A", "cdem", 93.456)}) == "task,method,accuracy\nC-A,cdem,93.5\n");
}

TEST_CASE("twelve tasks give thirteen rows with the mean") {
    std::vector<TaskResult> results;
    double sum = 0.0;
    for (int i = 0; i < 12; ++i) {
        const double acc = 80.0 + 1.37 * i;
        sum += acc;
        results.push_back(row("T" + std::to_string(i), "cdem", acc));
    }
    const auto ls = lines(results_csv(results));
    REQUIRE(ls.size() == 14);
    char expected[32];
    std::snprintf(expected, sizeof(expected), "Avg,cdem,%.1f", sum / 12);
    CHECK(ls.back() == expected);

    cdem::testing::ScratchDir dir("bench");
    emit_report(results, dir.path());
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(std::abs(report["averages"]["cdem"].get<double>() - sum / 12) <= 1e-9);
    CHECK(report["results"].size() == 12);
}

TEST_CASE("report files and embedding dumps") {
    const auto spec = standard_shift_spec(0);
    const auto task = generate(spec);
    auto config = synthetic_config(spec);
    config.iterations = 2;
    std::vector<TaskResult> results{run_baseline_source_only(task.pair, config, task.target_labels),
                                    run_cdem_task(task.pair, config, task.target_labels)};
    cdem::testing::ScratchDir dir("bench");
    emit_report(results, dir.path());
    for (const char* f : {"results.csv", "report.json", "timing.csv", "embedding_synthetic_source_only.csv",
                          "embedding_synthetic_cdem.csv"}) {
        CHECK(std::filesystem::exists(dir / f));
    }
    const auto emb = lines(slurp(dir / "embedding_synthetic_cdem.csv"));
    CHECK(emb.front() == "x,y,domain,label");
    CHECK(emb.size() == 401);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report["results"][1]["trace"].size() == 2);
    CHECK(report["results"][1]["trace"][0].contains("selected_per_class"));
}

TEST_CASE("baseline on identical domains equals source self-accuracy") {
    auto spec = standard_shift_spec(7);
    spec.separation = 3.0;  // some overlap so self-accuracy is below 100
    const auto task = generate(spec);
    const auto pair = make_domain_pair(task.pair.source, task.pair.source_labels, task.pair.source);
    const auto config = synthetic_config(spec);
    const auto r = run_baseline_source_only(pair, config, task.pair.source_labels);
    const auto prep = prepare_features(pair, config);
    const auto protos = fit_prototypes(prep.source, pair.source_labels.values(), 2);
    const auto self = nearest_prototype(protos.centers, prep.source);
    CHECK(*r.accuracy == accuracy_percent(self, pair.source_labels.values()));
    CHECK(*r.accuracy < 100.0);
}

TEST_CASE("ablation suite runs the four settings in order") {
    const auto spec = standard_shift_spec(0);
    const auto task = generate(spec);
    auto config = synthetic_config(spec);
    config.iterations = 2;
    const auto results = run_ablation_suite(task.pair, config, task.target_labels);
    REQUIRE(results.size() == 4);
    CHECK(results[0].method == "erm");
    CHECK(results[1].method == "erm+da");
    CHECK(results[2].method == "erm+da+cde");
    CHECK(results[3].method == "erm+da+cde+dfl");
}

TEST_CASE("grid search sweeps the named parameter") {
    auto spec = standard_shift_spec(0);
    spec.n_per_domain = 40;
    const auto task = generate(spec);
    auto config = synthetic_config(spec);
    config.iterations = 2;
    const auto points = grid_search(task.pair, config, task.target_labels, {"eta"});
    REQUIRE(points.size() == grid_values().size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(points[i].hp.eta == grid_values()[i]);
        CHECK(points[i].hp.beta == config.hp.beta);
        CHECK(points[i].accuracy >= 0.0);
        CHECK(points[i].accuracy <= 100.0);
    }
    CHECK_THROWS_AS(grid_search(task.pair, config, task.target_labels, {"delta"}), ConfigError);
}

TEST_CASE("parallel_for covers every index and rethrows failures") {
    std::vector<int> hits(50, 0);
    parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; });
    CHECK(std::count(hits.begin(), hits.end(), 1) == 50);
    CHECK_THROWS_AS(parallel_for(5, [](std::size_t i) {
                        if (i == 3) throw DataError("boom");
                    }),
                    DataError);
}
