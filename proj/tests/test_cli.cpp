#include <sys/wait.h>
#include <unistd.h>

#include <cstddef>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

#include "aaamdp/analysis.hpp"
#include "aaamdp/digest.hpp"
#include "aaamdp/version.hpp"

using namespace aaamdp;
namespace fs = std::filesystem;

namespace {

const fs::path kCli = AAAMDP_CLI_PATH;
const fs::path kDefaultParams = fs::path(AAAMDP_DATA_DIR) / "aaa_default_params.json";
const fs::path kSnapshotDir = AAAMDP_SNAPSHOT_DIR;

struct RunResult {
    int status = -1;
    std::string output;  // stdout and stderr interleaved
};

RunResult run(const std::string& command_line) {
    RunResult result;
    FILE* pipe = ::popen((command_line + " 2>&1").c_str(), "r");
    REQUIRE_MESSAGE(pipe != nullptr, ("popen failed for: " + command_line));
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe)) {
        result.output.append(buf, got);
    }
    const int raw = ::pclose(pipe);
    result.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return result;
}

std::string q(const fs::path& path) { return "'" + path.string() + "'"; }

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE_MESSAGE(in, ("cannot open " + path.string()));
    return std::string(std::istreambuf_iterator<char>(in), {});
}

void spill(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    REQUIRE_MESSAGE(bool(out), ("cannot write " + path.string()));
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

// Per-test scratch directory, removed on scope exit.
struct TempDir {
    explicit TempDir(const std::string& name)
        : path(fs::temp_directory_path() /
               ("aaamdp_cli_" + std::to_string(::getpid()) + "_" + name)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }

    fs::path path;
};

}  // namespace

TEST_CASE("solve writes the data files, a sealed manifest, and the snapshot grid") {
    TempDir tmp("solve");
    const fs::path out = tmp.path / "solve";
    const RunResult r =
        run(q(kCli) + " solve --params " + q(kDefaultParams) + " --out " + q(out));
    CAPTURE(r.output);
    REQUIRE(r.status == 0);
    CHECK(r.output.find("wrote 3 files plus manifest") != std::string::npos);
    CHECK(r.output.find('#') != std::string::npos);  // the ASCII policy rendering

    for (const char* name : {"policy_grid.csv", "qaly_map.csv", "report.json", "manifest.json"}) {
        CHECK_MESSAGE(fs::exists(out / name), (std::string("missing ") + name));
    }
    CHECK(slurp(out / "policy_grid.csv") == slurp(kSnapshotDir / "optimal_policy_grid.csv"));

    const auto manifest = nlohmann::json::parse(slurp(out / "manifest.json"));
    CHECK(manifest["command"] == "solve");
    CHECK(manifest["tool_version"] == kVersion);
    CHECK(manifest["parameter_digest"] == digest_file(kDefaultParams));
    CHECK(manifest["horizon"]["start_age"] == 65);
    CHECK(manifest["horizon"]["max_age"] == 120);
    CHECK(manifest["flags"]["terminal"] == "qaly");
    CHECK(manifest["outputs"] ==
          nlohmann::json({"policy_grid.csv", "qaly_map.csv", "report.json"}));

    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["command"] == "solve");
    CHECK(report["grids"]["policy"]["kind"] == "policy");
    CHECK(report["grids"]["value"]["kind"] == "value");
    CHECK(report["grids"]["policy"]["parameter_digest"] == digest_file(kDefaultParams));
}

TEST_CASE("a missing parameter file fails and names the path") {
    TempDir tmp("missing");
    const fs::path absent = tmp.path / "nowhere.json";
    const RunResult r =
        run(q(kCli) + " solve --params " + q(absent) + " --out " + q(tmp.path / "out"));
    CHECK(r.status != 0);
    CHECK(r.output.find(absent.string()) != std::string::npos);
}

TEST_CASE("validate rejects corrupted files with coordinates") {
    TempDir tmp("corrupt");
    auto j = nlohmann::ordered_json::parse(slurp(kDefaultParams));

    SUBCASE("a growth row that no longer sums to one") {
        j["growth"]["50-55 mm"]["50-55 mm"] = double(j["growth"]["50-55 mm"]["50-55 mm"]) - 0.02;
        const fs::path file = tmp.path / "bad_growth.json";
        spill(file, j.dump(2) + "\n");
        const RunResult r = run(q(kCli) + " validate --params " + q(file));
        CHECK(r.status != 0);
        CHECK(r.output.find("invalid input") != std::string::npos);
        CHECK(r.output.find("50-55 mm") != std::string::npos);
    }

    SUBCASE("an unsupported schema version") {
        j["schema_version"] = 2;
        const fs::path file = tmp.path / "bad_schema.json";
        spill(file, j.dump(2) + "\n");
        const RunResult r = run(q(kCli) + " validate --params " + q(file));
        CHECK(r.status != 0);
        CHECK(r.output.find("schema_version") != std::string::npos);
    }
}

TEST_CASE("validate accepts the shipped parameters") {
    const RunResult r = run(q(kCli) + " validate --params " + q(kDefaultParams));
    CAPTURE(r.output);
    CHECK(r.status == 0);
    CHECK(r.output.find("parameters OK") != std::string::npos);
    CHECK(r.output.find("fnv1a64:") != std::string::npos);
    CHECK(r.output.find("65..120") != std::string::npos);
}

TEST_CASE("evaluate --policy opt reproduces the solver's grids") {
    TempDir tmp("eval_opt");
    const fs::path solved = tmp.path / "solve";
    const fs::path evaluated = tmp.path / "eval";
    REQUIRE(run(q(kCli) + " solve --params " + q(kDefaultParams) + " --out " + q(solved))
                .status == 0);
    REQUIRE(run(q(kCli) + " evaluate --policy opt --params " + q(kDefaultParams) + " --out " +
                q(evaluated))
                .status == 0);
    CHECK(slurp(evaluated / "policy_grid.csv") == slurp(solved / "policy_grid.csv"));
    CHECK(slurp(evaluated / "qaly_map.csv") == slurp(solved / "qaly_map.csv"));
}

TEST_CASE("equal policies from different sources produce byte-identical data files") {
    TempDir tmp("eval_sources");
    const fs::path named = tmp.path / "named";
    const fs::path external = tmp.path / "external";

    const fs::path policy_csv = tmp.path / "baseline_policy.csv";
    spill(policy_csv, to_csv(policy_grid(clinical_policy_55({65, 120}))));

    REQUIRE(run(q(kCli) + " evaluate --policy p55 --params " + q(kDefaultParams) + " --out " +
                q(named))
                .status == 0);
    REQUIRE(run(q(kCli) + " evaluate --policy " + q(policy_csv) + " --params " +
                q(kDefaultParams) + " --out " + q(external))
                .status == 0);

    for (const char* name : {"policy_grid.csv", "qaly_map.csv", "report.json"}) {
        CHECK_MESSAGE(slurp(named / name) == slurp(external / name),
                      (std::string(name) + " differs between policy sources"));
    }
    // Only the manifest records where the policy came from.
    const auto named_manifest = nlohmann::json::parse(slurp(named / "manifest.json"));
    const auto external_manifest = nlohmann::json::parse(slurp(external / "manifest.json"));
    CHECK(named_manifest["flags"]["policy"] == "p55");
    CHECK(external_manifest["flags"]["policy"] == policy_csv.string());
}

TEST_CASE("a policy file with a missing age is rejected by age") {
    TempDir tmp("eval_partial");
    const std::string full = to_csv(policy_grid(clinical_policy_55({65, 120})));
    std::string partial;
    {
        std::istringstream in(full);
        for (std::string line; std::getline(in, line);) {
            if (line.rfind("68,", 0) == 0) continue;
            partial += line + "\n";
        }
    }
    const fs::path policy_csv = tmp.path / "partial_policy.csv";
    spill(policy_csv, partial);

    const RunResult r = run(q(kCli) + " evaluate --policy " + q(policy_csv) + " --params " +
                            q(kDefaultParams) + " --out " + q(tmp.path / "out"));
    CHECK(r.status != 0);
    CHECK(r.output.find("missing age 68") != std::string::npos);
}

TEST_CASE("compare prints the headline summary") {
    TempDir tmp("compare");
    const fs::path out = tmp.path / "cmp";
    const RunResult r =
        run(q(kCli) + " compare --params " + q(kDefaultParams) + " --out " + q(out));
    CAPTURE(r.output);
    REQUIRE(r.status == 0);

    std::string snapshot = slurp(kSnapshotDir / "compare_summary.txt");
    if (!snapshot.empty() && snapshot.back() == '\n') snapshot.pop_back();
    CHECK(first_line(r.output) == snapshot);

    CHECK(fs::exists(out / "gain_map.csv"));
    const auto report = nlohmann::json::parse(slurp(out / "report.json"));
    CHECK(report["summary"]["cells_differ"] == 196);
    CHECK(report["summary"]["argmax_age"] == 65);
    CHECK(report["summary"]["argmax_bin"] == "45-50 mm");
}

TEST_CASE("sensitivity runs are reproducible for a fixed seed") {
    TempDir tmp("sens_repro");
    const std::string common = " sensitivity --params " + q(kDefaultParams) +
                               " --replicates 50 --seed 7 --width rupture_prob=0.3" +
                               " --width elective_mortality=0.3 --out ";
    REQUIRE(run(q(kCli) + common + q(tmp.path / "a")).status == 0);
    REQUIRE(run(q(kCli) + common + q(tmp.path / "b")).status == 0);
    CHECK(slurp(tmp.path / "a" / "ratio_grid.csv") == slurp(tmp.path / "b" / "ratio_grid.csv"));

    const auto manifest = nlohmann::json::parse(slurp(tmp.path / "a" / "manifest.json"));
    CHECK(manifest["seed"] == 7);
    CHECK(manifest["replicates"] == 50);
    CHECK(manifest["flags"]["width"]["rupture_prob"] == 0.3);
}

TEST_CASE("zero-width sensitivity reproduces the solve grid byte for byte") {
    TempDir tmp("sens_zero");
    const fs::path solved = tmp.path / "solve";
    const fs::path sens = tmp.path / "sens";
    REQUIRE(run(q(kCli) + " solve --params " + q(kDefaultParams) + " --out " + q(solved))
                .status == 0);
    REQUIRE(run(q(kCli) + " sensitivity --params " + q(kDefaultParams) +
                " --replicates 20 --width rupture_prob=0 --out " + q(sens))
                .status == 0);
    CHECK(slurp(sens / "ratio_grid.csv") == slurp(solved / "policy_grid.csv"));
}

TEST_CASE("bias factor one reproduces the solve grid") {
    TempDir tmp("bias");
    const fs::path solved = tmp.path / "solve";
    const fs::path biased = tmp.path / "bias";
    REQUIRE(run(q(kCli) + " solve --params " + q(kDefaultParams) + " --out " + q(solved))
                .status == 0);
    const RunResult r = run(q(kCli) + " bias --params " + q(kDefaultParams) +
                            " --factors 1,0.5 --out " + q(biased));
    CAPTURE(r.output);
    REQUIRE(r.status == 0);
    CHECK(slurp(biased / "policy_grid_factor_1.csv") == slurp(solved / "policy_grid.csv"));
    CHECK(fs::exists(biased / "policy_grid_factor_0.5.csv"));

    const auto manifest = nlohmann::json::parse(slurp(biased / "manifest.json"));
    CHECK(manifest["flags"]["factors"] == nlohmann::json({1.0, 0.5}));
}

TEST_CASE("the CLI requires a subcommand") {
    const RunResult r = run(q(kCli));
    CHECK(r.status != 0);
}
