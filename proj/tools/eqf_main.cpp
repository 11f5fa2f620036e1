// eqf: simulation and comparison front end for the equivariant filter.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "eqf/sim/check.hpp"
#include "eqf/sim/config.hpp"
#include "eqf/sim/export.hpp"
#include "eqf/sim/simulation.hpp"

namespace fs = std::filesystem;
using namespace eqf::sim;

namespace {

SimConfig configFrom(const std::string& path) { return path.empty() ? SimConfig{} : loadConfig(path); }

void prepareDir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

void printTrackSummary(const RunRecord& record) {
    for (const FilterTrack& track : record.filters) {
        std::printf("%-15s", std::string(filterName(track.kind)).c_str());
        if (track.diverged) {
            std::printf(" diverged after %zu samples: %s\n", track.samples.size(), track.failure.c_str());
            continue;
        }
        const FilterSample& last = track.samples.back();
        std::printf(" final pos_err %.4g m  vel_err %.4g m/s  energy %.4g\n", last.positionError, last.velocityError,
                    last.energy);
    }
}

int simulate(const std::string& configPath, std::optional<std::uint64_t> seed, int run, const std::string& out) {
    SimConfig cfg = configFrom(configPath);
    if (seed) cfg.seed = *seed;
    cfg.validate();
    prepareDir(out);
    const RunRecord record = runExperiment(cfg, run);
    writeCsvFile((fs::path(out) / "run.csv").string(), {record});
    writeSvgFile((fs::path(out) / "run.svg").string(), runPanels(record));
    std::printf("seed %llu run %d, %zu samples\n", static_cast<unsigned long long>(cfg.seed), run, record.times.size());
    printTrackSummary(record);
    return 0;
}

int compare(const std::string& configPath, const std::string& filters, std::optional<int> runs,
            std::optional<std::uint64_t> seed, std::optional<int> workers, const std::string& out) {
    SimConfig cfg = configFrom(configPath);
    if (!filters.empty()) cfg.filters = parseFilterList(filters);
    if (runs) cfg.runs = *runs;
    if (seed) cfg.seed = *seed;
    if (workers) cfg.workers = *workers;
    cfg.validate();
    prepareDir(out);

    const MonteCarloResult result = monteCarlo(cfg, true);
    writeCsvFile((fs::path(out) / "runs.csv").string(), result.runs);
    {
        std::ofstream summary(fs::path(out) / "summary.csv", std::ios::binary);
        if (!summary) throw std::runtime_error("cannot write summary.csv");
        writeSummaryCsv(summary, result);
    }
    writeSvgFile((fs::path(out) / "compare.svg").string(), comparePanels(result));

    std::printf("%d runs, seed %llu\n", cfg.runs, static_cast<unsigned long long>(cfg.seed));
    std::printf("%-15s %9s %12s %12s %12s %12s %10s\n", "filter", "diverged", "vel[0,1]", "energy[0,1]", "pos[t>5]",
                "vel[t>5]", "t(pos<1m)");
    for (const FilterAggregate& f : result.filters) {
        const auto& t = result.times;
        std::printf("%-15s %9d %12.5g %12.5g %12.5g %12.5g %10.3g\n", std::string(filterName(f.kind)).c_str(),
                    f.divergedRuns, windowMean(t, f.meanVelocityError, 0.0, 1.0), windowMean(t, f.meanEnergy, 0.0, 1.0),
                    windowMean(t, f.meanPositionError, 5.0, cfg.duration),
                    windowMean(t, f.meanVelocityError, 5.0, cfg.duration), firstTimeBelow(t, f.meanPositionError, 1.0));
    }
    return 0;
}

int check(std::uint64_t seed, int samples) {
    bool ok = true;
    std::printf("%-42s %12s %10s %8s\n", "property", "max", "tolerance", "result");
    for (const PropertyCheck& c : runPropertyChecks(seed, samples)) {
        ok = ok && c.passed();
        std::printf("%-42s %12.3e %10.0e %8s\n", c.name.c_str(), c.maxResidual, c.tolerance, c.passed() ? "ok" : "FAIL");
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete-time equivariant filter: simulation, comparison and self-check"};
    app.require_subcommand(1);

    std::string configPath, outDir, filters;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs, workers;
    int runIndex = 0;
    int samples = 1000;
    std::uint64_t checkSeed = 1;

    auto* sim = app.add_subcommand("simulate", "Run one seeded realisation and write run.csv and run.svg");
    sim->add_option("--config", configPath, "TOML experiment file")->check(CLI::ExistingFile);
    sim->add_option("--seed", seed, "Random seed (overrides the config)");
    sim->add_option("--run", runIndex, "Run index within the seed")->check(CLI::NonNegativeNumber);
    sim->add_option("--out", outDir, "Output directory")->required();

    auto* cmp = app.add_subcommand("compare", "Monte-Carlo comparison; writes runs.csv, summary.csv and compare.svg");
    cmp->add_option("--filters", filters, "Comma separated: eqf, eqf-noreset, ekf, eqf-consistent");
    cmp->add_option("--runs", runs, "Number of runs")->check(CLI::PositiveNumber);
    cmp->add_option("--config", configPath, "TOML experiment file")->check(CLI::ExistingFile);
    cmp->add_option("--seed", seed, "Random seed (overrides the config)");
    cmp->add_option("--workers", workers, "Worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
    cmp->add_option("--out", outDir, "Output directory")->required();

    auto* chk = app.add_subcommand("check", "Run the property oracles and print residual maxima");
    chk->add_option("--seed", checkSeed, "Random seed");
    chk->add_option("--samples", samples, "Random samples per property")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) return simulate(configPath, seed, runIndex, outDir);
        if (cmp->parsed()) return compare(configPath, filters, runs, seed, workers, outDir);
        if (chk->parsed()) return check(checkSeed, samples);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "eqf: %s\n", e.what());
        return 2;
    }
    return 0;
}
