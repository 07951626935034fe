#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "mbm/decimation.hpp"
#include "mbm/exact_matcher.hpp"
#include "mbm/experiment.hpp"
#include "mbm/matching.hpp"
#include "mbm/point_cloud.hpp"

namespace {

using nlohmann::json;

constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

void print_error(const std::string& message, int exit_code) {
    json j;
    j["error"] = message;
    j["exit"] = exit_code;
    std::cerr << j.dump() << "\n";
}

// Input-file problems are usage errors, not compute errors.
mbm::PointCloud load_cloud_arg(const std::string& path) {
    try {
        return mbm::load_cloud_csv(path);
    } catch (const std::runtime_error& e) {
        throw std::invalid_argument(e.what());
    }
}

void print_manifest(const mbm::RunManifest& man) {
    std::cout << "mbmlab " << man.version << " " << man.command << "\n";
    for (const auto& c : man.checks) {
        const char* tag = c.status == "pass" ? "pass" : (c.status == "fail" ? "FAIL" : "skip");
        std::cout << "  [" << tag << "] " << c.name;
        if (!c.detail.empty()) std::cout << ": " << c.detail;
        std::cout << "\n";
    }
    std::cout << "instances solved: " << man.instances_solved << "\n";
    char wall[64];
    std::snprintf(wall, sizeof wall, "wall time: %.3fs\n", man.wall_seconds);
    std::cout << wall;
}

std::uint64_t parse_env_seed(const char* text) {
    std::uint64_t v = 0;
    const std::string s(text);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("MBMLAB_SEED must be a nonnegative integer, got '" + s + "'");
    return v;
}

int do_run(const std::string& config_path, bool seed_set, std::uint64_t seed, bool output_set,
           const std::string& output, bool csv_set, const std::string& csv, int workers_flag) {
    mbm::ExperimentConfig cfg = mbm::load_config(config_path);
    if (seed_set) {
        cfg.seed = seed;
        cfg.seed_explicit = true;
    } else if (!cfg.seed_explicit) {
        if (const char* env = std::getenv("MBMLAB_SEED")) {
            cfg.seed = parse_env_seed(env);
            cfg.seed_explicit = true;
        }
    }
    if (output_set) cfg.output_path = output;
    if (csv_set) cfg.csv_path = csv;
    if (workers_flag > 0) cfg.workers = workers_flag;
    const mbm::RunManifest man = mbm::run_experiment(cfg);
    print_manifest(man);
    if (!cfg.output_path.empty()) std::cout << "report: " << cfg.output_path << "\n";
    if (!cfg.csv_path.empty()) std::cout << "trial stream: " << cfg.csv_path << "\n";
    return man.all_passed() ? 0 : kExitFail;
}

int do_selftest(bool output_set, const std::string& output) {
    mbm::RunManifest man = mbm::run_selftest();
    print_manifest(man);
    if (output_set) {
        std::ofstream f(output, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open output file: " + output);
        f << man.report_json;
        std::cout << "report: " << output << "\n";
    }
    return man.all_passed() ? 0 : kExitFail;
}

json matching_json(const mbm::Matching& m) {
    json j;
    j["total_length"] = m.total_length;
    json pairs = json::array();
    for (const auto& [xi, yi] : m.pairs) pairs.push_back(json::array({xi, yi}));
    j["pairs"] = pairs;
    j["unmatched_x"] = m.unmatched_x;
    j["unmatched_y"] = m.unmatched_y;
    return j;
}

void print_matching_text(const mbm::Matching& m) {
    json total = m.total_length;  // shortest round-trip formatting
    std::cout << "total_length " << total.dump() << "\n";
    std::cout << "pairs " << m.pairs.size() << "\n";
    for (const auto& [xi, yi] : m.pairs) std::cout << xi << " " << yi << "\n";
    if (!m.unmatched_x.empty()) {
        std::cout << "unmatched_x";
        for (int i : m.unmatched_x) std::cout << " " << i;
        std::cout << "\n";
    }
    if (!m.unmatched_y.empty()) {
        std::cout << "unmatched_y";
        for (int i : m.unmatched_y) std::cout << " " << i;
        std::cout << "\n";
    }
}

int do_solve(const std::string& x_path, const std::string& y_path, bool as_json) {
    const mbm::PointCloud x = load_cloud_arg(x_path);
    const mbm::PointCloud y = load_cloud_arg(y_path);
    const mbm::Matching m = mbm::solve_exact(x, y);
    if (as_json)
        std::cout << matching_json(m).dump(2) << "\n";
    else
        print_matching_text(m);
    return 0;
}

int do_decimate(const std::string& x_path, const std::string& y_path, int depth, long m_cells,
                bool as_json) {
    const mbm::PointCloud x = load_cloud_arg(x_path);
    const mbm::PointCloud y = load_cloud_arg(y_path);
    const mbm::DecimationResult res = m_cells > 0 ? mbm::padded_subdivision(x, y, m_cells)
                                                  : mbm::decimation_match(x, y, depth);
    if (as_json) {
        json j;
        j["matching"] = matching_json(res.matching);
        j["depth"] = res.depth;
        j["cells_per_unit"] = res.cells_per_unit;
        j["leaf_cost"] = res.leaf_cost;
        j["claimed_total"] = res.claimed_total();
        j["upper_bound"] = res.upper_bound();
        j["per_level_discrepancy_sum"] = res.per_level_discrepancy_sum;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << "total_length " << json(res.matching.total_length).dump() << "\n";
        std::cout << "upper_bound " << json(res.upper_bound()).dump() << "\n";
        std::cout << "depth " << res.depth << " cells_per_unit " << res.cells_per_unit << "\n";
        std::cout << "level_discrepancies";
        for (std::size_t k = 1; k < res.per_level_discrepancy_sum.size(); ++k)
            std::cout << " " << res.per_level_discrepancy_sum[k];
        std::cout << "\n";
        std::cout << "unmatched " << res.matching.unmatched_x.size() + res.matching.unmatched_y.size()
                  << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Euclidean minimum bipartite matching lab"};
    app.require_subcommand(1);

    std::string config_path, output, csv, x_path, y_path;
    std::uint64_t seed = 0;
    int workers_flag = 0;
    int depth = 2;
    long m_cells = 0;
    bool as_json = false;

    CLI::App* run = app.add_subcommand("run", "execute an experiment config file");
    run->add_option("config", config_path, "config file")->required();
    run->add_option("--seed", seed, "override the experiment seed");
    run->add_option("--output", output, "JSON report path");
    run->add_option("--csv", csv, "per-trial CSV stream path");
    run->add_option("--workers", workers_flag, "worker thread count");

    CLI::App* self = app.add_subcommand("selftest", "run the fast property suite");
    self->add_option("--output", output, "JSON report path");

    CLI::App* solve = app.add_subcommand("solve", "exact matching of two point CSV files");
    solve->add_option("x", x_path, "first cloud CSV")->required();
    solve->add_option("y", y_path, "second cloud CSV")->required();
    solve->add_flag("--json", as_json, "emit JSON");

    CLI::App* dec = app.add_subcommand("decimate", "hierarchical matching of two point CSV files");
    dec->add_option("x", x_path, "first cloud CSV")->required();
    dec->add_option("y", y_path, "second cloud CSV")->required();
    dec->add_option("--depth", depth, "subdivision depth")->check(CLI::Range(1, 30));
    dec->add_option("--m", m_cells, "cells per axis for a non-dyadic subdivision");
    dec->add_flag("--json", as_json, "emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (run->parsed())
            return do_run(config_path, run->count("--seed") > 0, seed, run->count("--output") > 0,
                          output, run->count("--csv") > 0, csv, workers_flag);
        if (self->parsed()) return do_selftest(self->count("--output") > 0, output);
        if (solve->parsed()) return do_solve(x_path, y_path, as_json);
        if (dec->parsed()) return do_decimate(x_path, y_path, depth, m_cells, as_json);
    } catch (const std::invalid_argument& e) {
        print_error(e.what(), kExitUsage);
        return kExitUsage;
    } catch (const std::exception& e) {
        print_error(e.what(), kExitFail);
        return kExitFail;
    }
    return kExitUsage;
}
