#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "aaamdp/analysis.hpp"
#include "aaamdp/digest.hpp"
#include "aaamdp/version.hpp"

namespace {

using namespace aaamdp;
using nlohmann::ordered_json;

std::string fmt(double x) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

// Everything the subcommands share; CLI11 fills it in.
struct Args {
    std::string params;
    std::string out;
    std::string terminal = "qaly";
    std::string policy = "opt";
    std::uint64_t seed = 0;
    int replicates = 1000;
    std::vector<std::string> width_args;
    std::vector<double> factors = {1.0, 0.75, 0.5};
    std::vector<std::string> bins = {"55-60 mm", "60-65 mm", "65-70 mm",
                                     "70-75 mm", "75-80 mm", ">80 mm"};
};

TerminalReward parse_terminal(const std::string& name) {
    return name == "zero" ? TerminalReward::Zero : TerminalReward::QalyAtMaxAge;
}

std::map<std::string, double> parse_widths(const std::vector<std::string>& args) {
    std::map<std::string, double> widths;
    for (const auto& arg : args) {
        const auto eq = arg.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("--width expects FAMILY=FRACTION, got '" + arg + "'");
        }
        const std::string family = arg.substr(0, eq);
        const std::string frac = arg.substr(eq + 1);
        double w = 0.0;
        auto [ptr, ec] = std::from_chars(frac.data(), frac.data() + frac.size(), w);
        if (ec != std::errc() || ptr != frac.data() + frac.size()) {
            throw std::runtime_error("--width " + family + ": not a number: '" + frac + "'");
        }
        if (widths.contains(family)) {
            throw std::runtime_error("--width given twice for family " + family);
        }
        widths[family] = w;
    }
    return widths;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Collects the data files of one run, then seals them with a manifest.
class OutputWriter {
  public:
    explicit OutputWriter(const std::string& dir) : dir_(dir) {
        std::filesystem::create_directories(dir_);
    }

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        out << content;
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        names_.push_back(name);
    }

    void write_manifest(ordered_json manifest) {
        manifest["outputs"] = names_;
        std::ofstream out(dir_ / "manifest.json", std::ios::binary);
        out << manifest.dump(2) << "\n";
        if (!out) throw std::runtime_error("cannot write " + (dir_ / "manifest.json").string());
    }

    int count() const { return static_cast<int>(names_.size()); }
    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
    std::vector<std::string> names_;
};

ordered_json grid_envelope(const GridReport& grid) {
    return ordered_json::parse(to_json(grid));
}

ordered_json manifest_base(const std::string& command, const Args& args,
                           const std::string& digest, const ParameterSet& p,
                           std::uint64_t seed, int replicates) {
    ordered_json m;
    m["command"] = command;
    m["tool_version"] = kVersion;
    m["parameter_file"] = args.params;
    m["parameter_digest"] = digest;
    m["seed"] = seed;
    m["replicates"] = replicates;
    m["horizon"]["start_age"] = p.start_age();
    m["horizon"]["max_age"] = p.max_age();
    m["flags"]["terminal"] = args.terminal;
    return m;
}

ordered_json report_base(const std::string& command, const Args& args,
                         const std::string& digest) {
    ordered_json r;
    r["command"] = command;
    r["tool_version"] = kVersion;
    r["parameter_digest"] = digest;
    r["terminal"] = args.terminal;
    return r;
}

int cmd_solve(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    const std::string digest = digest_file(args.params);
    const Solution solution = solve_backward_induction(build_process(p, parse_terminal(args.terminal)));

    GridReport policy = policy_grid(solution.policy);
    GridReport value = qaly_map(solution.values);
    policy.provenance.parameter_digest = digest;
    value.provenance.parameter_digest = digest;

    OutputWriter out(args.out);
    out.write("policy_grid.csv", to_csv(policy));
    out.write("qaly_map.csv", to_csv(value));
    ordered_json report = report_base("solve", args, digest);
    report["grids"]["policy"] = grid_envelope(policy);
    report["grids"]["value"] = grid_envelope(value);
    out.write("report.json", report.dump(2) + "\n");
    out.write_manifest(manifest_base("solve", args, digest, p, 0, 0));

    std::cout << ascii_policy_grid(policy);
    std::cout << "wrote " << out.count() << " files plus manifest to " << out.dir().string()
              << "\n";
    return 0;
}

int cmd_evaluate(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    const std::string digest = digest_file(args.params);
    const DecisionProcess process = build_process(p, parse_terminal(args.terminal));

    Policy policy;
    if (args.policy == "opt") {
        policy = solve_backward_induction(process).policy;
    } else if (args.policy == "p55") {
        policy = clinical_policy_55(p.horizon);
    } else {
        const GridReport grid = grid_from_csv(read_file(args.policy), GridKind::Policy);
        policy = policy_from_grid(grid, p.horizon);
    }
    const ValueFunction values = evaluate_policy(process, policy);

    GridReport pgrid = policy_grid(policy);
    GridReport value = qaly_map(values);
    pgrid.provenance.parameter_digest = digest;
    value.provenance.parameter_digest = digest;

    OutputWriter out(args.out);
    out.write("policy_grid.csv", to_csv(pgrid));
    out.write("qaly_map.csv", to_csv(value));
    // The report depends only on the resolved policy, so equal policies
    // from different sources produce byte-identical data files (the
    // manifest records the source).
    ordered_json report = report_base("evaluate", args, digest);
    report["grids"]["policy"] = grid_envelope(pgrid);
    report["grids"]["value"] = grid_envelope(value);
    out.write("report.json", report.dump(2) + "\n");
    ordered_json manifest = manifest_base("evaluate", args, digest, p, 0, 0);
    manifest["flags"]["policy"] = args.policy;
    out.write_manifest(std::move(manifest));

    std::cout << ascii_policy_grid(pgrid);
    std::cout << "wrote " << out.count() << " files plus manifest to " << out.dir().string()
              << "\n";
    return 0;
}

int cmd_compare(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    const std::string digest = digest_file(args.params);
    const DecisionProcess process = build_process(p, parse_terminal(args.terminal));

    const Solution solution = solve_backward_induction(process);
    const Policy baseline = clinical_policy_55(p.horizon);
    const ValueFunction base_values = evaluate_policy(process, baseline);

    GridReport gain = qaly_gain_map(solution.values, base_values);
    gain.provenance.parameter_digest = digest;
    const GridReport opt_grid = policy_grid(solution.policy);
    const GridReport base_grid = policy_grid(baseline);

    double max_gain = 0.0;
    int argmax_row = 0;
    int argmax_col = 0;
    int cells_differ = 0;
    for (int row = 0; row < gain.num_rows(); ++row) {
        for (int col = 0; col < gain.num_cols(); ++col) {
            if (gain.cells(row, col) > max_gain) {
                max_gain = gain.cells(row, col);
                argmax_row = row;
                argmax_col = col;
            }
            if (opt_grid.cells(row, col) != base_grid.cells(row, col)) ++cells_differ;
        }
    }

    OutputWriter out(args.out);
    out.write("gain_map.csv", to_csv(gain));
    ordered_json report = report_base("compare", args, digest);
    report["summary"]["max_gain"] = max_gain;
    report["summary"]["argmax_age"] = gain.ages[argmax_row];
    report["summary"]["argmax_bin"] = gain.columns[argmax_col];
    report["summary"]["cells_differ"] = cells_differ;
    report["grids"]["gain"] = grid_envelope(gain);
    out.write("report.json", report.dump(2) + "\n");
    out.write_manifest(manifest_base("compare", args, digest, p, 0, 0));

    std::cout << "max gain " << fmt(max_gain) << " QALYs at age " << gain.ages[argmax_row]
              << " in " << gain.columns[argmax_col] << "; policies differ on " << cells_differ
              << " of " << gain.num_rows() * gain.num_cols() << " cells\n";
    std::cout << "wrote " << out.count() << " files plus manifest to " << out.dir().string()
              << "\n";
    return 0;
}

int cmd_sensitivity(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    const std::string digest = digest_file(args.params);

    PerturbationSpec spec;
    spec.widths = parse_widths(args.width_args);
    spec.replicates = args.replicates;
    spec.seed = args.seed;

    GridReport ratio = sensitivity_ratio(p, spec, parse_terminal(args.terminal));
    ratio.provenance.parameter_digest = digest;

    OutputWriter out(args.out);
    out.write("ratio_grid.csv", to_csv(ratio));
    ordered_json report = report_base("sensitivity", args, digest);
    report["seed"] = spec.seed;
    report["replicates"] = spec.replicates;
    report["widths"] = ordered_json::object();
    for (const auto& [family, width] : spec.widths) report["widths"][family] = width;
    report["grids"]["ratio"] = grid_envelope(ratio);
    out.write("report.json", report.dump(2) + "\n");
    ordered_json manifest = manifest_base("sensitivity", args, digest, p, spec.seed,
                                          spec.replicates);
    for (const auto& [family, width] : spec.widths) manifest["flags"]["width"][family] = width;
    out.write_manifest(std::move(manifest));

    std::cout << "wrote sensitivity ratio grid (replicates=" << spec.replicates
              << ", seed=" << spec.seed << ") to " << out.dir().string() << "\n";
    return 0;
}

int cmd_bias(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    const std::string digest = digest_file(args.params);

    auto results = bias_experiment(p, args.factors, args.bins, parse_terminal(args.terminal));

    OutputWriter out(args.out);
    ordered_json report = report_base("bias", args, digest);
    report["factors"] = args.factors;
    report["bins"] = args.bins;
    report["grids"] = ordered_json::object();
    for (auto& [factor, grid] : results) {
        grid.provenance.parameter_digest = digest;
        const std::string name = "policy_grid_factor_" + fmt(factor) + ".csv";
        out.write(name, to_csv(grid));
        report["grids"][fmt(factor)] = grid_envelope(grid);
        std::cout << "factor " << fmt(factor) << ":\n" << ascii_policy_grid(grid);
    }
    out.write("report.json", report.dump(2) + "\n");
    ordered_json manifest = manifest_base("bias", args, digest, p, 0, 0);
    manifest["flags"]["factors"] = args.factors;
    manifest["flags"]["bins"] = args.bins;
    out.write_manifest(std::move(manifest));

    std::cout << "wrote " << out.count() << " files plus manifest to " << out.dir().string()
              << "\n";
    return 0;
}

int cmd_validate(const Args& args) {
    const ParameterSet p = load_parameters(args.params);
    std::cout << "parameters OK: " << args.params << "\n";
    std::cout << "  digest:     " << digest_file(args.params) << "\n";
    std::cout << "  ages:       " << p.start_age() << ".." << p.max_age() << "\n";
    if (!p.description.empty()) std::cout << "  description: " << p.description << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-horizon decision model for aneurysm surveillance and elective repair"};
    app.require_subcommand(1);

    Args args;
    auto add_common = [&](CLI::App* sub, bool with_out) {
        sub->add_option("--params", args.params, "parameter file (JSON)")->required();
        if (with_out) sub->add_option("--out", args.out, "output directory")->required();
        sub->add_option("--terminal", args.terminal,
                        "terminal reward: QALY weight at the maximal age, or zero")
            ->check(CLI::IsMember({"qaly", "zero"}))
            ->capture_default_str();
        return sub;
    };

    auto* solve = add_common(app.add_subcommand("solve", "compute the optimal policy"), true);
    auto* evaluate =
        add_common(app.add_subcommand("evaluate", "value a fixed policy"), true);
    evaluate->add_option("--policy", args.policy, "opt, p55, or a policy grid CSV path")
        ->capture_default_str();
    auto* compare = add_common(
        app.add_subcommand("compare", "optimal policy versus the 55 mm baseline"), true);
    auto* sensitivity = add_common(
        app.add_subcommand("sensitivity", "surgery ratio under perturbed parameters"), true);
    sensitivity->add_option("--seed", args.seed, "perturbation seed")->capture_default_str();
    sensitivity->add_option("--replicates", args.replicates, "number of perturbed replicates")
        ->capture_default_str();
    sensitivity->add_option("--width", args.width_args,
                            "FAMILY=FRACTION relative perturbation width (repeatable)");
    auto* bias = add_common(
        app.add_subcommand("bias", "optimal policies under scaled rupture probabilities"),
        true);
    bias->add_option("--factors", args.factors, "comma-separated scale factors")
        ->delimiter(',')
        ->capture_default_str();
    bias->add_option("--bins", args.bins, "comma-separated diameter bins to scale")
        ->delimiter(',');
    auto* validate =
        add_common(app.add_subcommand("validate", "check a parameter file"), false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) return cmd_solve(args);
        if (evaluate->parsed()) return cmd_evaluate(args);
        if (compare->parsed()) return cmd_compare(args);
        if (sensitivity->parsed()) return cmd_sensitivity(args);
        if (bias->parsed()) return cmd_bias(args);
        if (validate->parsed()) return cmd_validate(args);
    } catch (const ValidationError& e) {
        std::cerr << "invalid input:\n" << e.report().str();
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
