// truncexp — command-line front end.
//
// Subcommands:
//   estimate   point estimate, standard error, naive-design comparison and
//              variance-inflation factor from durations or summary statistics
//   simulate   replicated scenario runs driven by a config file
//   profile    the score curve over a rate grid (its sign change brackets the
//              point estimate)
//
// Exit codes: 0 success, 2 usage error, 3 data/consistency error,
// 4 numerical or internal failure.

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "truncexp/estimator.hpp"
#include "truncexp/model.hpp"
#include "truncexp/montecarlo.hpp"

using nlohmann::json;

namespace {

// Command-line misuse distinct from bad data; maps to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Formatting: every numeric value is emitted with 6 significant digits, and
// JSON numbers are rounded to those digits before insertion so that both
// output modes carry identical values.
// ---------------------------------------------------------------------------

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

double round6(double v) {
    if (!std::isfinite(v)) {
        return v;
    }
    return std::strtod(fmt6(v).c_str(), nullptr);
}

json json_number(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return round6(v);
}

json json_optional(const std::optional<double>& v) {
    return v ? json_number(*v) : json(nullptr);
}

const char* boundary_name(truncexp::Boundary b) {
    switch (b) {
        case truncexp::Boundary::Lower:
            return "lower";
        case truncexp::Boundary::Upper:
            return "upper";
        default:
            return "none";
    }
}

// ---------------------------------------------------------------------------
// Input parsing helpers
// ---------------------------------------------------------------------------

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

bool parse_double(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) {
        return false;
    }
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(line);
    while (std::getline(in, item, sep)) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::vector<std::string> tokenize(const std::string& line) {
    if (line.find(',') != std::string::npos) {
        return split(line, ',');
    }
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string tok;
    while (in >> tok) {
        out.push_back(tok);
    }
    return out;
}

// Reads a durations file: one duration per line, or delimited columns with an
// optional header naming a "duration" column. Extra columns (entry times)
// are accepted and ignored.
std::vector<double> read_durations(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw truncexp::DataError("cannot open durations file: " + path);
    }
    std::vector<double> xs;
    std::size_t column = 0;
    bool saw_header_or_data = false;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const std::vector<std::string> toks = tokenize(t);
        if (!saw_header_or_data) {
            saw_header_or_data = true;
            double probe;
            bool numeric = true;
            for (const std::string& tok : toks) {
                if (!parse_double(tok, probe)) {
                    numeric = false;
                    break;
                }
            }
            if (!numeric) {
                // Header line: find the duration column.
                bool found = false;
                for (std::size_t i = 0; i < toks.size(); ++i) {
                    if (lower(trim(toks[i])) == "duration") {
                        column = i;
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    throw truncexp::DataError(
                        path + ": header line has no 'duration' column");
                }
                continue;
            }
        }
        if (column >= toks.size()) {
            throw truncexp::DataError(path + ": line " + std::to_string(lineno) +
                                      ": missing duration column");
        }
        double x;
        if (!parse_double(toks[column], x)) {
            throw truncexp::DataError(path + ": line " + std::to_string(lineno) +
                                      ": cannot parse duration '" +
                                      trim(toks[column]) + "'");
        }
        if (x < 0.0) {
            throw truncexp::DataError(path + ": line " + std::to_string(lineno) +
                                      ": negative duration");
        }
        xs.push_back(x);
    }
    return xs;
}

// Expands grouped interval counts like "82:0-5,112:6-10" into sufficient
// statistics, assigning every count the midpoint of its interval.
truncexp::SufficientStats expand_grouped(const std::string& grouped_arg) {
    truncexp::SufficientStats st;
    st.sum_x2 = 0.0;
    for (const std::string& raw : split(grouped_arg, ',')) {
        const std::string item = trim(raw);
        if (item.empty()) {
            continue;
        }
        const std::size_t colon = item.find(':');
        const std::size_t dash = item.find('-', colon == std::string::npos ? 0 : colon + 1);
        if (colon == std::string::npos || dash == std::string::npos) {
            throw UsageError("--grouped item '" + item +
                             "' is not of the form count:low-high");
        }
        double count, lo, hi;
        if (!parse_double(item.substr(0, colon), count) ||
            !parse_double(item.substr(colon + 1, dash - colon - 1), lo) ||
            !parse_double(item.substr(dash + 1), hi)) {
            throw UsageError("--grouped item '" + item + "' has non-numeric parts");
        }
        if (count < 0.0 || count != std::floor(count)) {
            throw UsageError("--grouped count in '" + item +
                             "' must be a non-negative integer");
        }
        if (hi < lo || lo < 0.0) {
            throw UsageError("--grouped interval in '" + item + "' is invalid");
        }
        const double mid = 0.5 * (lo + hi);
        st.m += static_cast<std::int64_t>(count);
        st.sum_x += count * mid;
        *st.sum_x2 += count * mid * mid;
    }
    if (st.m == 0) {
        throw UsageError("--grouped expanded to zero observations");
    }
    return st;
}

// ---------------------------------------------------------------------------
// Scenario config files: flat "key = value" lines, one [scenario] section per
// scenario, '#' comments. Required fields: theta0, g, s, n, r, seed.
// ---------------------------------------------------------------------------

struct PendingScenario {
    std::size_t header_line = 0;
    std::optional<double> theta0, g, s, epsilon;
    std::optional<double> n, r;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> seen;
};

truncexp::SimulationScenario finalize_scenario(const PendingScenario& p) {
    const auto missing = [&](const char* field) {
        throw truncexp::ConfigParseError(
            "scenario starting at line " + std::to_string(p.header_line) +
            ": missing field '" + field + "'");
    };
    if (!p.theta0) missing("theta0");
    if (!p.g) missing("g");
    if (!p.s) missing("s");
    if (!p.n) missing("n");
    if (!p.r) missing("r");
    if (!p.seed) missing("seed");

    truncexp::SimulationScenario scn;
    scn.theta0 = *p.theta0;
    scn.cfg.g = *p.g;
    scn.cfg.s = *p.s;
    scn.cfg.epsilon = p.epsilon.value_or(1e-6);
    if (*p.n < 1.0 || *p.n != std::floor(*p.n)) {
        throw truncexp::ConfigParseError(
            "scenario starting at line " + std::to_string(p.header_line) +
            ": field 'n' must be a positive integer");
    }
    if (*p.r < 1.0 || *p.r != std::floor(*p.r)) {
        throw truncexp::ConfigParseError(
            "scenario starting at line " + std::to_string(p.header_line) +
            ": field 'r' must be a positive integer");
    }
    scn.n = static_cast<std::int64_t>(*p.n);
    scn.replications = static_cast<int>(*p.r);
    scn.master_seed = *p.seed;
    return scn;
}

std::vector<truncexp::SimulationScenario> parse_scenarios(std::istream& in) {
    std::vector<truncexp::SimulationScenario> out;
    std::optional<PendingScenario> current;
    std::string line;
    std::size_t lineno = 0;

    const auto close_current = [&]() {
        if (current) {
            out.push_back(finalize_scenario(*current));
            current.reset();
        }
    };

    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) {
            line = line.substr(0, hash);
        }
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        if (t.front() == '[') {
            if (t != "[scenario]") {
                throw truncexp::ConfigParseError(
                    "line " + std::to_string(lineno) + ": unknown section '" + t +
                    "' (only [scenario] is recognized)");
            }
            close_current();
            current.emplace();
            current->header_line = lineno;
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw truncexp::ConfigParseError("line " + std::to_string(lineno) +
                                             ": expected 'key = value'");
        }
        const std::string key = lower(trim(t.substr(0, eq)));
        const std::string value = trim(t.substr(eq + 1));
        if (!current) {
            // Keys before any header form a single implicit scenario.
            current.emplace();
            current->header_line = lineno;
        }
        for (const std::string& k : current->seen) {
            if (k == key) {
                throw truncexp::ConfigParseError("line " + std::to_string(lineno) +
                                                 ": duplicate field '" + key + "'");
            }
        }
        current->seen.push_back(key);

        const auto numeric = [&](const char* field) {
            double v;
            if (!parse_double(value, v)) {
                throw truncexp::ConfigParseError(
                    "line " + std::to_string(lineno) + ": invalid value '" + value +
                    "' for field '" + field + "'");
            }
            return v;
        };
        if (key == "theta0") {
            current->theta0 = numeric("theta0");
        } else if (key == "g") {
            current->g = numeric("g");
        } else if (key == "s") {
            current->s = numeric("s");
        } else if (key == "epsilon") {
            current->epsilon = numeric("epsilon");
        } else if (key == "n") {
            current->n = numeric("n");
        } else if (key == "r") {
            current->r = numeric("r");
        } else if (key == "seed") {
            char* end = nullptr;
            const std::string v = trim(value);
            const unsigned long long parsed = std::strtoull(v.c_str(), &end, 10);
            if (v.empty() || end != v.c_str() + v.size()) {
                throw truncexp::ConfigParseError(
                    "line " + std::to_string(lineno) + ": invalid value '" + value +
                    "' for field 'seed' (expected an unsigned integer)");
            }
            current->seed = static_cast<std::uint64_t>(parsed);
        } else {
            throw truncexp::ConfigParseError("line " + std::to_string(lineno) +
                                             ": unknown field '" + key + "'");
        }
    }
    close_current();
    if (out.empty()) {
        throw truncexp::ConfigParseError("config contains no scenarios");
    }
    return out;
}

// ---------------------------------------------------------------------------
// estimate
// ---------------------------------------------------------------------------

struct EstimateArgs {
    double g = 0.0, s = 0.0, epsilon = 1e-6;
    std::string file;
    std::string grouped;
    std::int64_t m = -1;
    double sum_x = std::numeric_limits<double>::quiet_NaN();
    double sum_x2 = std::numeric_limits<double>::quiet_NaN();
    bool have_m = false, have_sum_x = false, have_sum_x2 = false;
    bool as_json = false;
};

void print_estimate(const truncexp::EstimateReport& rep, bool as_json,
                    bool have_sum_x2) {
    if (as_json) {
        json j;
        j["theta_hat"] = json_number(rep.theta_hat);
        j["se_hat"] = json_optional(rep.se_hat);
        j["n_hat"] = json_number(rep.n_hat);
        j["theta_srs"] = json_number(rep.theta_srs);
        j["se_srs"] = json_number(rep.se_srs);
        j["vif_hat"] = json_optional(rep.vif_hat);
        j["boundary"] = rep.boundary == truncexp::Boundary::None
                            ? json(nullptr)
                            : json(boundary_name(rep.boundary));
        std::cout << j.dump() << "\n";
        return;
    }
    const std::string se_note =
        rep.boundary != truncexp::Boundary::None
            ? "n/a (boundary estimate)"
            : "n/a (requires --sum-x2 or a durations file)";
    std::printf("theta_hat            %s\n", fmt6(rep.theta_hat).c_str());
    if (rep.se_hat) {
        std::printf("se_hat               %s\n", fmt6(*rep.se_hat).c_str());
    } else {
        std::printf("se_hat               %s\n", se_note.c_str());
    }
    std::printf("n_hat                %s\n", fmt6(rep.n_hat).c_str());
    std::printf("theta_srs            %s\n", fmt6(rep.theta_srs).c_str());
    std::printf("se_srs               %s\n", fmt6(rep.se_srs).c_str());
    if (rep.vif_hat) {
        std::printf("vif_hat              %s\n", fmt6(*rep.vif_hat).c_str());
    } else {
        std::printf("vif_hat              n/a\n");
    }
    std::printf("boundary             %s\n", boundary_name(rep.boundary));
    std::printf("boundary_diagnostic  %s (%s)\n", fmt6(rep.boundary_diag).c_str(),
                rep.boundary_diag > 0.0
                    ? "positive: no lower-boundary pin expected"
                    : "non-positive: the estimate pins at the lower bound");
    (void)have_sum_x2;
}

int cmd_estimate(const EstimateArgs& args) {
    const int sources = (args.file.empty() ? 0 : 1) +
                        (args.grouped.empty() ? 0 : 1) +
                        ((args.have_m || args.have_sum_x) ? 1 : 0);
    if (sources != 1) {
        throw UsageError(
            "exactly one data source is required: --file, --grouped, or "
            "inline statistics (--m with --sum-x)");
    }

    truncexp::ModelConfig cfg{args.g, args.s, args.epsilon};
    cfg.validate();

    truncexp::SufficientStats stats;
    bool have_sum_x2 = false;
    if (!args.file.empty()) {
        stats = truncexp::SufficientStats::from_durations(
            read_durations(args.file));
        have_sum_x2 = true;
    } else if (!args.grouped.empty()) {
        stats = expand_grouped(args.grouped);
        have_sum_x2 = true;
    } else {
        if (!args.have_m || !args.have_sum_x) {
            throw UsageError("inline statistics need both --m and --sum-x");
        }
        stats.m = args.m;
        stats.sum_x = args.sum_x;
        if (args.have_sum_x2) {
            stats.sum_x2 = args.sum_x2;
            have_sum_x2 = true;
        }
    }
    stats.validate();

    const truncexp::EstimateReport rep = truncexp::estimate(cfg, stats);
    print_estimate(rep, args.as_json, have_sum_x2);
    return 0;
}

// ---------------------------------------------------------------------------
// profile
// ---------------------------------------------------------------------------

struct ProfileArgs {
    double g = 0.0, s = 0.0, epsilon = 1e-6;
    std::int64_t m = 0;
    double sum_x = 0.0;
    double from = 0.0, to = 0.0, step = 0.0;
    bool as_json = false;
};

int cmd_profile(const ProfileArgs& args) {
    truncexp::ModelConfig cfg{args.g, args.s, args.epsilon};
    cfg.validate();
    if (!(args.from > 0.0) || !(args.step > 0.0)) {
        throw UsageError("--from and --step must be positive");
    }
    if (args.to > 1.0 / args.epsilon) {
        throw UsageError("--to exceeds the upper end of the parameter space");
    }
    const double span = args.to - args.from;
    const std::int64_t npoints =
        span < 0.0 ? 0 : 1 + static_cast<std::int64_t>(span / args.step + 1e-9);
    if (npoints < 2) {
        throw UsageError("the grid must contain at least two points");
    }
    truncexp::SufficientStats stats;
    stats.m = args.m;
    stats.sum_x = args.sum_x;
    stats.validate();

    if (!args.as_json) {
        std::printf("theta,score\n");
    }
    for (std::int64_t i = 0; i < npoints; ++i) {
        const double theta = args.from + static_cast<double>(i) * args.step;
        const double sc = truncexp::score(cfg, stats, theta);
        if (args.as_json) {
            json j;
            j["theta"] = json_number(theta);
            j["score"] = json_number(sc);
            std::cout << j.dump() << "\n";
        } else {
            std::printf("%s,%s\n", fmt6(theta).c_str(), fmt6(sc).c_str());
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string config_path;
    int threads = 0;
    bool as_json = false;
};

int cmd_simulate(const SimulateArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) {
        throw truncexp::DataError("cannot open config file: " + args.config_path);
    }
    std::vector<truncexp::SimulationScenario> scenarios = parse_scenarios(in);

    if (const char* env = std::getenv("TRUNCEXP_SEED")) {
        char* end = nullptr;
        const unsigned long long seed = std::strtoull(env, &end, 10);
        if (*env == '\0' || end == env || *end != '\0') {
            throw UsageError("TRUNCEXP_SEED must be an unsigned integer");
        }
        for (auto& scn : scenarios) {
            scn.master_seed = static_cast<std::uint64_t>(seed);
        }
    }

    if (!args.as_json) {
        std::printf("%10s %8s %8s %10s %8s %12s %12s %12s %12s %10s %9s %6s\n",
                    "theta0", "g", "s", "n", "r", "seed", "bias",
                    "sigma2_hat", "n_var_sim", "vif", "boundary", "empty");
    }
    for (const auto& scn : scenarios) {
        const truncexp::SimulationReport rep =
            truncexp::run_scenario(scn, false, args.threads);
        if (args.as_json) {
            json j;
            j["theta0"] = json_number(scn.theta0);
            j["g"] = json_number(scn.cfg.g);
            j["s"] = json_number(scn.cfg.s);
            j["n"] = scn.n;
            j["r"] = scn.replications;
            j["seed"] = scn.master_seed;
            j["mean_bias"] = json_number(rep.mean_bias);
            j["mean_sigma2_hat"] = json_number(rep.mean_sigma2_hat);
            j["n_var_sim"] = json_number(rep.n_var_sim);
            j["mean_vif"] = json_number(rep.mean_vif);
            j["boundary_count"] = rep.boundary_count;
            j["empty_count"] = rep.empty_count;
            std::cout << j.dump() << "\n";
        } else {
            std::printf(
                "%10s %8s %8s %10lld %8d %12llu %12s %12s %12s %10s %9lld %6lld\n",
                fmt6(scn.theta0).c_str(), fmt6(scn.cfg.g).c_str(),
                fmt6(scn.cfg.s).c_str(), static_cast<long long>(scn.n),
                scn.replications,
                static_cast<unsigned long long>(scn.master_seed),
                fmt6(rep.mean_bias).c_str(), fmt6(rep.mean_sigma2_hat).c_str(),
                fmt6(rep.n_var_sim).c_str(), fmt6(rep.mean_vif).c_str(),
                static_cast<long long>(rep.boundary_count),
                static_cast<long long>(rep.empty_count));
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "truncexp: rate estimation for exponential durations observed "
        "under double truncation"};
    app.require_subcommand(1);

    EstimateArgs est;
    CLI::App* estimate_cmd = app.add_subcommand(
        "estimate", "Estimate the rate from observed durations");
    estimate_cmd->add_option("--g", est.g, "Birth-window length")->required();
    estimate_cmd->add_option("--s", est.s, "Observation-window length")->required();
    estimate_cmd->add_option("--epsilon", est.epsilon,
                             "Parameter-space bound (default 1e-6)");
    estimate_cmd->add_option("--file", est.file,
                             "Durations file (one value per line, or delimited "
                             "columns with a 'duration' header)")
        ->check(CLI::ExistingFile);
    estimate_cmd->add_option("--grouped", est.grouped,
                             "Grouped counts like \"82:0-5,112:6-10\" expanded "
                             "to interval midpoints");
    auto* opt_m = estimate_cmd->add_option("--m", est.m, "Observed count");
    auto* opt_sx =
        estimate_cmd->add_option("--sum-x", est.sum_x, "Sum of durations");
    auto* opt_sx2 = estimate_cmd->add_option(
        "--sum-x2", est.sum_x2, "Sum of squared durations (enables se_hat)");
    estimate_cmd->add_flag("--json", est.as_json,
                           "Emit one JSON record instead of text");

    ProfileArgs prof;
    CLI::App* profile_cmd = app.add_subcommand(
        "profile", "Emit the score curve over a rate grid as CSV");
    profile_cmd->add_option("--g", prof.g, "Birth-window length")->required();
    profile_cmd->add_option("--s", prof.s, "Observation-window length")->required();
    profile_cmd->add_option("--epsilon", prof.epsilon,
                            "Parameter-space bound (default 1e-6)");
    profile_cmd->add_option("--m", prof.m, "Observed count")->required();
    profile_cmd->add_option("--sum-x", prof.sum_x, "Sum of durations")->required();
    profile_cmd->add_option("--from", prof.from, "Grid start")->required();
    profile_cmd->add_option("--to", prof.to, "Grid end")->required();
    profile_cmd->add_option("--step", prof.step, "Grid step")->required();
    profile_cmd->add_flag("--json", prof.as_json,
                          "Emit one JSON record per grid point");

    SimulateArgs sim;
    CLI::App* simulate_cmd = app.add_subcommand(
        "simulate", "Run simulation scenarios from a config file");
    simulate_cmd
        ->add_option("config", sim.config_path, "Scenario config file")
        ->required()
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--threads", sim.threads,
                             "Worker threads (0 = hardware concurrency)");
    simulate_cmd->add_flag("--json", sim.as_json,
                           "Emit one JSON record per scenario");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        est.have_m = opt_m->count() > 0;
        est.have_sum_x = opt_sx->count() > 0;
        est.have_sum_x2 = opt_sx2->count() > 0;
        if (estimate_cmd->parsed()) {
            return cmd_estimate(est);
        }
        if (profile_cmd->parsed()) {
            return cmd_profile(prof);
        }
        return cmd_simulate(sim);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const truncexp::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const truncexp::DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const truncexp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
}
