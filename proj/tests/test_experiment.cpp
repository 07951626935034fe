#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mbm/experiment.hpp"
#include "mbm/scaling.hpp"

using namespace mbm;
using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config text parses sections, comments, arrays, and scalars") {
    const ExperimentConfig c = parse_config_text(
        "# full surface\n"
        "kind = \"concentration\"  # trailing comment\n"
        "[experiment]\n"
        "dim = 3\n"
        "size = 500\n"
        "trials = 100\n"
        "seed = 9\n"
        "t_grid = [0.5, 1.0, 1.5]\n"
        "\n"
        "[output]\n"
        "output = \"report.json\"\n"
        "csv = \"trials.csv\"\n"
        "workers = 4\n");
    CHECK(c.kind == ExperimentKind::Concentration);
    CHECK(c.dims == std::vector<int>{3});
    CHECK(c.sizes == std::vector<long>{500});
    CHECK(c.trials == std::vector<long>{100});
    CHECK(c.seed == 9);
    CHECK(c.seed_explicit);
    CHECK(c.t_grid == std::vector<double>{0.5, 1.0, 1.5});
    CHECK(c.output_path == "report.json");
    CHECK(c.csv_path == "trials.csv");
    CHECK(c.workers == 4);
    c.validate();
}

TEST_CASE("config parser rejects malformed input") {
    CHECK_THROWS_AS(parse_config_text("dim = 3\n"), std::invalid_argument);  // missing kind
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\nwhat = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"no_such_kind\"\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\ndim = 3\ndim = 4\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\nseed = \"five\"\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\nsizes = [1, x]\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\nbroken\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\ntrials = 2.5\n"),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_config_text("kind = \"beta_scan\"\nseed = -4\n"),
                    std::invalid_argument);
}

TEST_CASE("kind names round-trip") {
    for (ExperimentKind k :
         {ExperimentKind::BetaScan, ExperimentKind::Concentration, ExperimentKind::Subadditivity,
          ExperimentKind::DecimationAudit, ExperimentKind::AnomalousScaling,
          ExperimentKind::RandomLink})
        CHECK(experiment_kind_from_string(to_string(k)) == k);
}

TEST_CASE("config validation enforces kind-specific completeness") {
    ExperimentConfig c;
    c.kind = ExperimentKind::BetaScan;
    c.dims = {3};
    c.sizes = {10, 20, 40, 100};
    c.trials = {10};
    c.validate();

    ExperimentConfig bad = c;
    bad.trials = {1};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.sizes = {10, 20, 20, 100};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.dims = {2};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.sizes = {10, 20, 40, 80};
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = c;
    bad.workers = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    ExperimentConfig dec;
    dec.kind = ExperimentKind::DecimationAudit;
    dec.dims = {4};
    dec.sizes = {64};
    dec.trials = {5};
    dec.depth = 8;
    CHECK_THROWS_AS(dec.validate(), std::invalid_argument);  // depth * dim too deep
    dec.depth = 3;
    dec.validate();

    ExperimentConfig an;
    an.kind = ExperimentKind::AnomalousScaling;
    an.dims = {3};
    an.sizes = {16, 32};
    an.trials = {5};
    CHECK_THROWS_AS(an.validate(), std::invalid_argument);
    an.dims = {2};
    an.validate();

    ExperimentConfig sub;
    sub.kind = ExperimentKind::Subadditivity;
    sub.dims = {2};
    sub.sizes = {64};
    sub.trials = {10};
    sub.csv_path = "x.csv";
    CHECK_THROWS_AS(sub.validate(), std::invalid_argument);
    sub.csv_path.clear();
    sub.m = 0;
    CHECK_THROWS_AS(sub.validate(), std::invalid_argument);
}

TEST_CASE("experiment reports are byte-stable and worker-count invariant") {
    ExperimentConfig c;
    c.kind = ExperimentKind::BetaScan;
    c.dims = {3};
    c.sizes = {8, 16, 32, 64, 96};
    c.trials = {30};
    c.seed = 5;
    c.workers = 1;
    const RunManifest a = run_experiment(c);
    c.workers = 4;
    const RunManifest b = run_experiment(c);
    CHECK(a.report_json == b.report_json);
    CHECK(a.instances_solved == 150);
    CHECK(a.report_json.find("wall") == std::string::npos);
    CHECK(a.report_json.find("workers") == std::string::npos);

    const json rep = json::parse(a.report_json);
    const ScalingEstimate ref =
        scan_beta(3, CardinalityMode::Fixed, c.sizes, c.trials, c.seed, 1);
    CHECK(rep["results"]["per_dim"][0]["beta_hat"].get<double>() == ref.beta_hat);
    CHECK(rep["results"]["per_dim"][0]["means"].get<std::vector<double>>() == ref.means);
    CHECK(rep["config"]["seed"].get<std::uint64_t>() == 5);
}

TEST_CASE("experiment report and trial stream land on disk") {
    TempFile out("mbm_test_report.json");
    TempFile csv("mbm_test_trials.csv");
    ExperimentConfig c;
    c.kind = ExperimentKind::DecimationAudit;
    c.dims = {2};
    c.sizes = {48};
    c.trials = {10};
    c.depth = 2;
    c.seed = 3;
    c.output_path = out.path;
    c.csv_path = csv.path;
    const RunManifest man = run_experiment(c);
    CHECK(man.all_passed());
    CHECK(slurp(out.path) == man.report_json);
    const std::string stream = slurp(csv.path);
    CHECK(stream.rfind("N,dim,trial,seed,length\n", 0) == 0);
    long rows = -1;  // header
    for (char ch : stream)
        if (ch == '\n') ++rows;
    CHECK(rows == 10);
    const json rep = json::parse(man.report_json);
    CHECK(rep["results"]["failures"].get<long>() == 0);
    CHECK(rep["results"]["mean_exact"].get<double>() <=
          rep["results"]["mean_heuristic"].get<double>());
    CHECK(rep["results"]["mean_heuristic"].get<double>() <=
          rep["results"]["mean_upper_bound"].get<double>());
}

TEST_CASE("concentration trial stream mirrors the report sample") {
    TempFile csv("mbm_test_conc.csv");
    ExperimentConfig c;
    c.kind = ExperimentKind::Concentration;
    c.dims = {3};
    c.sizes = {32};
    c.trials = {80};
    c.seed = 12;
    c.csv_path = csv.path;
    const RunManifest man = run_experiment(c);
    const json rep = json::parse(man.report_json);

    std::istringstream in(slurp(csv.path));
    std::string line;
    std::getline(in, line);  // header
    double sum = 0.0;
    long count = 0;
    while (std::getline(in, line)) {
        const auto last = line.rfind(',');
        sum += std::stod(line.substr(last + 1));
        ++count;
    }
    CHECK(count == 80);
    const double denom = std::pow(32.0, 2.0 / 3.0);
    CHECK(rep["results"]["mean_normalized"].get<double>() ==
          doctest::Approx(sum / 80.0 / denom).epsilon(1e-12));
}

TEST_CASE("subadditivity experiment bundles the cardinality checks") {
    ExperimentConfig c;
    c.kind = ExperimentKind::Subadditivity;
    c.dims = {2};
    c.sizes = {64};
    c.trials = {60};
    c.m = 2;
    c.seed = 8;
    const RunManifest man = run_experiment(c);
    CHECK(man.checks.size() == 4);
    CHECK(man.all_passed());
    const json rep = json::parse(man.report_json);
    CHECK(rep["results"]["count_discrepancy"]["bound"].get<double>() ==
          doctest::Approx(std::sqrt(128.0)));
    CHECK(rep["results"]["mean_split"]["dyadic_applicable"].get<bool>());
    CHECK(rep["results"]["cardinality_transfer"]["coupling_violations"].get<long>() == 0);
}

TEST_CASE("random link experiment reproduces the closed-form means") {
    ExperimentConfig c;
    c.kind = ExperimentKind::RandomLink;
    c.sizes = {1, 2};
    c.trials = {4000};
    c.distribution = LinkDistribution::Exponential;
    c.seed = 21;
    const RunManifest man = run_experiment(c);
    CHECK(man.all_passed());
    bool saw_oracle = false;
    for (const auto& chk : man.checks)
        if (chk.name == "small_size_oracle") {
            saw_oracle = true;
            CHECK(chk.status == "pass");
        }
    CHECK(saw_oracle);
}

TEST_CASE("anomalous experiment runs the planar growth comparison") {
    ExperimentConfig c;
    c.kind = ExperimentKind::AnomalousScaling;
    c.dims = {2};
    c.sizes = {32, 64};
    c.trials = {40};
    c.seed = 31;
    const RunManifest man = run_experiment(c);
    const json rep = json::parse(man.report_json);
    CHECK(rep["results"].contains("hierarchical_growth"));
    CHECK(rep["results"]["hierarchical_growth"]["c_fit"].get<double>() > 0.0);
    bool growth_listed = false;
    for (const auto& chk : man.checks)
        if (chk.name == "growth_envelope") growth_listed = true;
    CHECK(growth_listed);
}

TEST_CASE("selftest property suite passes quickly") {
    const RunManifest man = run_selftest();
    CHECK(man.all_passed());
    CHECK(man.checks.size() == 7);
    CHECK(man.wall_seconds < 60.0);
    CHECK(man.report_json.find("wall") == std::string::npos);
    const json rep = json::parse(man.report_json);
    CHECK(rep["command"].get<std::string>() == "selftest");
    CHECK_FALSE(rep.contains("config"));
}
