// Command-line front end: DoF tables, alignment solves, feasibility
// probes and link-level simulation, all reproducible from one --seed.

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "relayia/dof.hpp"
#include "relayia/feasibility.hpp"
#include "relayia/io.hpp"
#include "relayia/transceiver.hpp"

using namespace relayia;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitVerification = 4;
constexpr const char* kArtifactVersion = "1.0.0";

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct InfeasibleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct VerificationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// RELAYIA_OUT_DIR prefixes relative output paths.
std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    const char* dir = std::getenv("RELAYIA_OUT_DIR");
    if (!dir || *dir == '\0' || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(dir) / path).string();
}

json make_manifest(const std::string& command, const json& flags, std::uint64_t seed,
                   const std::vector<std::string>& outputs) {
    json m;
    m["command"] = command;
    m["flags"] = flags;
    m["seed"] = seed;
    m["artifact_version"] = kArtifactVersion;
    m["outputs"] = outputs;
    return m;
}

// CSV files get their manifest as a sidecar next to the data.
void write_manifest_sidecar(const std::string& csv_path, const json& manifest) {
    save_json(manifest, csv_path + ".manifest.json");
}

struct Range {
    int lo = 0;
    int hi = 0;
};

Range parse_range(const std::string& s) {
    Range r;
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            r.lo = r.hi = std::stoi(s);
        } else {
            r.lo = std::stoi(s.substr(0, dots));
            r.hi = std::stoi(s.substr(dots + 2));
        }
    } catch (const std::exception&) {
        throw UsageError("bad range '" + s + "', expected 'a' or 'a..b'");
    }
    if (r.lo < 1 || r.hi < r.lo) throw UsageError("empty or invalid range '" + s + "'");
    return r;
}

std::vector<double> parse_grid(const std::string& s) {
    std::vector<double> grid;
    std::size_t pos = 0;
    while (pos < s.size()) {
        const auto comma = s.find(',', pos);
        const std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        try {
            grid.push_back(std::stod(tok));
        } catch (const std::exception&) {
            throw UsageError("bad power grid entry '" + tok + "'");
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (grid.size() < 2) throw UsageError("power grid needs at least two comma-separated values");
    return grid;
}

json verify_beams(const ChannelSet& channels, const BeamformerSet& beams, double tol) {
    const double residual = alignment_residual(channels, beams);
    const SeparabilityReport report = verify_pair_separability(channels, beams, beams.topology);

    json r;
    r["alignment_residual"] = residual;
    r["alignment_ok"] = residual <= tol;
    r["separability_ok"] = report.all_ok;
    r["pairs"] = json::array();
    for (const auto& p : report.pairs)
        r["pairs"].push_back({{"a", to_string(p.a)},
                              {"b", to_string(p.b)},
                              {"interference_rank", p.interference_rank},
                              {"rank_with_a", p.rank_with_a},
                              {"rank_with_b", p.rank_with_b},
                              {"margin", p.margin},
                              {"ok", p.ok}});
    if (beams.topology == Topology::MultipleUnicast) {
        const double identity = redundancy_identity_residual(channels, beams);
        r["redundant_equation_residual"] = identity;
        r["redundant_equation_ok"] = identity <= tol;
    }
    bool ok = r["alignment_ok"].get<bool>() && report.all_ok;
    if (r.contains("redundant_equation_ok")) ok = ok && r["redundant_equation_ok"].get<bool>();
    r["ok"] = ok;
    return r;
}

// ---- subcommands ----------------------------------------------------------

int cmd_dof_table(Topology topology, const std::string& m_range, const std::string& n_range,
                  const std::string& out) {
    const Range mr = parse_range(m_range);
    const Range nr = parse_range(n_range);
    const std::string path = resolve_out(out);

    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot open for writing: " + path);
    csv << "M,N,ratio,d_star_num,d_star_den,counting_num,counting_den,"
           "feasible_floor,regime,redundancy\n";
    for (int M = mr.lo; M <= mr.hi; ++M)
        for (int N = nr.lo; N <= nr.hi; ++N) {
            const DofProfile p = classify(topology, M, N);
            csv << M << ',' << N << ',' << Rational(M, N).str() << ','
                << p.d_star.num() << ',' << p.d_star.den() << ','
                << p.counting_bound.num() << ',' << p.counting_bound.den() << ','
                << p.feasible_floor << ',' << regime_label(topology, p.regime) << ','
                << to_string(p.redundancy) << '\n';
        }
    csv.close();

    write_manifest_sidecar(path, make_manifest("dof-table",
                                               {{"topology", to_string(topology)},
                                                {"M", m_range},
                                                {"N", n_range},
                                                {"out", out}},
                                               0, {path}));
    return 0;
}

int cmd_solve(Topology topology, int M, int N, std::uint64_t seed, const std::string& out,
              const std::string& channels_out) {
    FeasibilityResult result;
    try {
        result = feasibility_scheme(topology, M, N, seed);
    } catch (const std::invalid_argument& e) {
        throw InfeasibleError(e.what());
    }

    const json flags = {{"topology", to_string(topology)}, {"M", M}, {"N", N},
                        {"seed", seed},                    {"out", out}};
    const std::string beams_path = resolve_out(out);
    json beams_doc = beams_to_json(result.beams);
    beams_doc["d"] = result.d;
    beams_doc["route"] = result.route == SchemeRoute::StackedNullSpace ? "stacked" : "pairwise";
    beams_doc["reduced_M"] = result.reduced.config.M;
    beams_doc["reduced_N"] = result.reduced.config.N;
    beams_doc["manifest"] = make_manifest("solve", flags, seed, {beams_path});
    save_json(beams_doc, beams_path);

    if (!channels_out.empty()) {
        const std::string ch_path = resolve_out(channels_out);
        json ch_doc = channels_to_json(result.reduced);
        ch_doc["manifest"] = make_manifest("solve", flags, seed, {ch_path});
        save_json(ch_doc, ch_path);
    }
    return 0;
}

int cmd_verify(const std::string& beams_path, const std::string& channels_path,
               const std::string& report_path, double tol) {
    const BeamformerSet beams = beams_from_json(load_json(beams_path));
    const ChannelSet channels = channels_from_json(load_json(channels_path));
    if (channels.config.M != beams.M)
        throw UsageError("beamformer and channel antenna counts disagree");

    json report = verify_beams(channels, beams, tol);
    const std::string path = resolve_out(report_path);
    report["manifest"] = make_manifest("verify",
                                       {{"beams", beams_path},
                                        {"channels", channels_path},
                                        {"report", report_path},
                                        {"tol", tol}},
                                       0, {path});
    save_json(report, path);
    if (!report["ok"].get<bool>()) throw VerificationError("verification checks failed");
    return 0;
}

int cmd_probe(Topology topology, int M, int N, int d, int seeds, std::uint64_t seed,
              const std::string& out) {
    json verdicts = json::array();
    bool all_feasible = true;
    for (int i = 0; i < seeds; ++i) {
        const ChannelSet cs = generate_generic({M, N}, seed + static_cast<std::uint64_t>(i));
        const ProbeVerdict v = probe_infeasibility(cs, topology, d);
        all_feasible = all_feasible && v.feasible;
        verdicts.push_back({{"seed", seed + static_cast<std::uint64_t>(i)},
                            {"feasible", v.feasible},
                            {"evidence",
                             {{"user_cap_needed", v.evidence.user_cap_needed},
                              {"stacked_route", v.evidence.stacked_route},
                              {"pairwise_route", v.evidence.pairwise_route},
                              {"detail", v.evidence.detail}}}});
    }

    json doc;
    doc["topology"] = to_string(topology);
    doc["M"] = M;
    doc["N"] = N;
    doc["d"] = d;
    doc["d_star"] = dof_star(topology, M, N).str();
    doc["feasible"] = all_feasible;
    doc["verdicts"] = verdicts;
    doc["manifest"] = make_manifest("probe",
                                    {{"topology", to_string(topology)},
                                     {"M", M},
                                     {"N", N},
                                     {"d", d},
                                     {"seeds", seeds}},
                                    seed, out.empty() ? std::vector<std::string>{}
                                                      : std::vector<std::string>{resolve_out(out)});
    if (out.empty())
        std::printf("%s\n", doc.dump(2).c_str());
    else
        save_json(doc, resolve_out(out));
    if (!all_feasible) throw InfeasibleError("demand d=" + std::to_string(d) + " infeasible at (" +
                                             std::to_string(M) + ", " + std::to_string(N) + ")");
    return 0;
}

int cmd_simulate(Topology topology, int M, int N, const std::string& snr, int trials,
                 std::uint64_t seed, const std::string& out) {
    const std::vector<double> grid = parse_grid(snr);
    SimResult result;
    try {
        result = simulate({M, N}, topology, grid, trials, seed);
    } catch (const std::invalid_argument& e) {
        throw InfeasibleError(e.what());
    }
    if (result.max_decode_error > 1e-8)
        throw VerificationError("noise-free decode check failed during simulation");

    const std::string path = resolve_out(out);
    std::ofstream csv(path);
    if (!csv) throw std::runtime_error("cannot open for writing: " + path);
    csv << "power_dB,message_src,message_dst,mean_rate_bits,trials\n";
    char buf[64];
    for (std::size_t pi = 0; pi < result.power_dB.size(); ++pi)
        for (std::size_t m = 0; m < result.order.size(); ++m) {
            std::snprintf(buf, sizeof buf, "%.12g", result.mean_rate[pi][m]);
            csv << result.power_dB[pi] << ',' << result.order[m].src << ','
                << result.order[m].dst << ',' << buf << ',' << result.trials << '\n';
        }
    csv.close();

    const json flags = {{"topology", to_string(topology)}, {"M", M},       {"N", N},
                        {"snr", snr},                      {"trials", trials}, {"out", out}};
    const std::string summary_path = path + ".summary.json";
    json summary;
    summary["max_decode_error"] = result.max_decode_error;
    summary["slopes"] = json::array();
    for (std::size_t m = 0; m < result.order.size(); ++m)
        summary["slopes"].push_back({{"src", result.order[m].src},
                                     {"dst", result.order[m].dst},
                                     {"bits_per_doubling", result.slope[m]}});
    summary["manifest"] = make_manifest("simulate", flags, seed, {path, summary_path});
    save_json(summary, summary_path);
    write_manifest_sidecar(path, make_manifest("simulate", flags, seed, {path, summary_path}));
    return 0;
}

int cmd_pipeline(Topology topology, int M, int N, std::optional<int> demand, std::uint64_t seed,
                 const std::string& snr, int trials, const std::string& out, double tol) {
    json report;
    report["topology"] = to_string(topology);
    report["M"] = M;
    report["N"] = N;

    const DofProfile profile = classify(topology, M, N);
    const int d = demand.value_or(static_cast<int>(profile.feasible_floor));
    report["d"] = d;
    report["d_star"] = profile.d_star.str();

    auto finish = [&](const char* stage, const std::string& error) -> void {
        report["failed_stage"] = stage;
        report["error"] = error;
        const std::string path = resolve_out(out);
        if (!out.empty()) save_json(report, path);
        std::printf("%s\n", report.dump(2).c_str());
    };

    // probe stage: establish feasibility of the demand before solving
    if (d < 1 || d > profile.feasible_floor) {
        const ChannelSet cs = generate_generic({M, N}, seed);
        const ProbeVerdict v =
            d >= 1 ? probe_infeasibility(cs, topology, d)
                   : ProbeVerdict{false, {0, false, false, "demand below one stream"}, {}, {}};
        report["probe"] = {{"feasible", v.feasible}, {"detail", v.evidence.detail}};
        finish("probe", "demand d=" + std::to_string(d) + " is infeasible");
        throw InfeasibleError("demand d=" + std::to_string(d) + " is infeasible at (" +
                              std::to_string(M) + ", " + std::to_string(N) + ")");
    }
    report["probe"] = {{"feasible", true},
                       {"detail", "d = " + std::to_string(d) + " within floor(d*)"}};

    FeasibilityResult scheme;
    try {
        scheme = feasibility_scheme(topology, M, N, seed);
    } catch (const std::exception& e) {
        finish("solve", e.what());
        throw VerificationError(e.what());
    }
    report["solve"] = {{"route", scheme.route == SchemeRoute::StackedNullSpace ? "stacked"
                                                                               : "pairwise"},
                       {"reduced_M", scheme.reduced.config.M},
                       {"reduced_N", scheme.reduced.config.N}};

    const json verification = verify_beams(scheme.reduced, scheme.beams, tol);
    report["verify"] = verification;
    if (!verification["ok"].get<bool>()) {
        finish("verify", "alignment verification failed");
        throw VerificationError("alignment verification failed");
    }

    SimResult sim;
    try {
        sim = simulate({M, N}, topology, parse_grid(snr), trials, seed);
    } catch (const std::exception& e) {
        finish("simulate", e.what());
        throw VerificationError(e.what());
    }
    json slopes = json::array();
    bool slopes_ok = true;
    for (std::size_t m = 0; m < sim.order.size(); ++m) {
        slopes.push_back({{"src", sim.order[m].src},
                          {"dst", sim.order[m].dst},
                          {"bits_per_doubling", sim.slope[m]}});
        slopes_ok = slopes_ok && sim.slope[m] > 0.5;
    }
    report["simulate"] = {{"max_decode_error", sim.max_decode_error},
                          {"slopes", slopes},
                          {"trials", sim.trials}};
    if (sim.max_decode_error > 1e-8 || !slopes_ok) {
        finish("simulate", "decode check or slope sanity failed");
        throw VerificationError("decode check or slope sanity failed");
    }

    report["ok"] = true;
    const json flags = {{"topology", to_string(topology)}, {"M", M},           {"N", N},
                        {"d", d},                          {"snr", snr},       {"trials", trials},
                        {"out", out}};
    report["manifest"] = make_manifest("pipeline", flags, seed,
                                       out.empty() ? std::vector<std::string>{}
                                                   : std::vector<std::string>{resolve_out(out)});
    if (!out.empty()) save_json(report, resolve_out(out));
    std::printf("%s\n", report.dump(2).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear alignment solver and simulator for the 4-user MIMO relay network"};
    app.require_subcommand(1);

    std::string topology_str = "y";
    int M = 0, N = 0, d = 1, seeds = 1, trials = 200;
    std::uint64_t seed = 1;
    double tol = 1e-9;
    std::string m_range, n_range, out, channels_path, beams_path, report_path;
    std::string snr = "30,40,50,60";
    std::optional<int> pipeline_d;

    auto* dof_table = app.add_subcommand("dof-table", "Emit the DoF grid as CSV");
    dof_table->add_option("--topology", topology_str)->check(CLI::IsMember({"y", "x"}));
    dof_table->add_option("--M", m_range, "user antennas, 'a' or 'a..b'")->required();
    dof_table->add_option("--N", n_range, "relay antennas, 'c' or 'c..d'")->required();
    dof_table->add_option("--out", out)->required();

    auto* solve = app.add_subcommand("solve", "Solve beamformers at floor(d*)");
    solve->add_option("--topology", topology_str)->check(CLI::IsMember({"y", "x"}));
    solve->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    solve->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    solve->add_option("--seed", seed);
    solve->add_option("--out", out)->required();
    solve->add_option("--channels", channels_path, "also write the reduced channels");

    auto* verify = app.add_subcommand("verify", "Re-check a solved beamformer set");
    verify->add_option("--beams", beams_path)->required();
    verify->add_option("--channels", channels_path)->required();
    verify->add_option("--report", report_path)->required();
    verify->add_option("--tol", tol);

    auto* probe = app.add_subcommand("probe", "Feasibility verdict at a DoF demand");
    probe->add_option("--topology", topology_str)->check(CLI::IsMember({"y", "x"}));
    probe->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    probe->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    probe->add_option("--d", d)->required()->check(CLI::PositiveNumber);
    probe->add_option("--seeds", seeds)->check(CLI::PositiveNumber);
    probe->add_option("--seed", seed);
    probe->add_option("--out", out);

    auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo rate versus power");
    simulate_cmd->add_option("--topology", topology_str)->check(CLI::IsMember({"y", "x"}));
    simulate_cmd->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--snr", snr, "comma-separated dB grid");
    simulate_cmd->add_option("--trials", trials)->check(CLI::PositiveNumber);
    simulate_cmd->add_option("--seed", seed);
    simulate_cmd->add_option("--out", out)->required();

    auto* pipeline = app.add_subcommand("pipeline", "generate -> solve -> verify -> simulate");
    pipeline->add_option("--topology", topology_str)->check(CLI::IsMember({"y", "x"}));
    pipeline->add_option("--M", M)->required()->check(CLI::PositiveNumber);
    pipeline->add_option("--N", N)->required()->check(CLI::PositiveNumber);
    pipeline->add_option("--d", pipeline_d, "DoF demand, defaults to floor(d*)");
    pipeline->add_option("--seed", seed);
    pipeline->add_option("--snr", snr);
    pipeline->add_option("--trials", trials)->check(CLI::PositiveNumber);
    pipeline->add_option("--out", out, "also write the report to a file");
    pipeline->add_option("--tol", tol);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        const Topology topology = topology_from_string(topology_str);
        if (dof_table->parsed()) return cmd_dof_table(topology, m_range, n_range, out);
        if (solve->parsed()) return cmd_solve(topology, M, N, seed, out, channels_path);
        if (verify->parsed()) return cmd_verify(beams_path, channels_path, report_path, tol);
        if (probe->parsed()) return cmd_probe(topology, M, N, d, seeds, seed, out);
        if (simulate_cmd->parsed()) return cmd_simulate(topology, M, N, snr, trials, seed, out);
        if (pipeline->parsed())
            return cmd_pipeline(topology, M, N, pipeline_d, seed, snr, trials, out, tol);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitUsage;
    } catch (const InfeasibleError& e) {
        std::fprintf(stderr, "infeasible: %s\n", e.what());
        return kExitInfeasible;
    } catch (const VerificationError& e) {
        std::fprintf(stderr, "verification failure: %s\n", e.what());
        return kExitVerification;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
