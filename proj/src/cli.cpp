// SPDX-License-Identifier: Apache-2.0
//
// cfsched: user scheduling and robust beamforming for user-centric cell-free MIMO
// Copyright (C) 2026 The cfsched authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "cfsched/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

namespace cfsched {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_output_dir(const std::optional<std::string>& flag, const char* env_value,
                               const std::string& from_config) {
    if (flag && !flag->empty()) return *flag;
    if (env_value && *env_value) return env_value;
    return from_config;
}

std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9e", v);
    return buf;
}

void write_slots_csv(std::ostream& os, const CampaignMetrics& m) {
    os << "# " << kCsvSchema << " slots\n";
    os << "realization,slot,user,rate,scheduled,weight\n";
    for (const auto& r : m.realizations)
        for (const auto& s : r.slots)
            for (int u = 0; u < r.num_users; ++u)
                os << r.index << ',' << s.slot << ',' << u << ',' << fmt_num(s.rate(u)) << ','
                   << static_cast<int>(s.scheduled[u]) << ',' << fmt_num(s.weights(u)) << '\n';
}

void write_users_csv(std::ostream& os, const CampaignMetrics& m) {
    os << "# " << kCsvSchema << " users\n";
    os << "realization,user,long_term_se\n";
    for (const auto& r : m.realizations)
        for (int u = 0; u < r.num_users; ++u) os << r.index << ',' << u << ',' << fmt_num(r.long_term(u)) << '\n';
}

TraceResult run_trace(const CampaignConfig& cfg) {
    cfg.validate();
    const RealizationSetup setup = setup_realization(cfg, 0);
    const ChannelSet ch = slot_channels(cfg, setup, 0);
    TraceResult tr;
    tr.num_rrh = setup.net.num_rrh();
    tr.num_users = setup.net.num_users();
    tr.state = solve(setup.net, ch, Eigen::VectorXd::Ones(tr.num_users), cfg.solver);
    return tr;
}

void write_trace_csv(std::ostream& os, const TraceResult& tr) {
    os << "# " << kCsvSchema << " trace\n";
    os << "iteration,rrh,objective,power,mu,lambda\n";
    for (std::size_t it = 0; it < tr.state.iterations.size(); ++it) {
        const auto& rec = tr.state.iterations[it];
        for (int r = 0; r < tr.num_rrh; ++r)
            os << it << ',' << r << ',' << fmt_num(rec.objective) << ',' << fmt_num(rec.power(r)) << ','
               << fmt_num(rec.mu(r)) << ',' << fmt_num(rec.lambda(r)) << '\n';
    }
}

std::vector<SweepRow> run_sweep(const CampaignConfig& cfg, SweepAxis axis) {
    std::vector<CampaignConfig> runs;
    if (axis == SweepAxis::TauP) {
        for (int tp : {16, 32, 64}) {
            CampaignConfig c = cfg;
            c.tau_p = tp;
            runs.push_back(c);
        }
    } else {
        for (Scheme s : all_schemes()) {
            CampaignConfig c = cfg;
            c.scheme = s;
            runs.push_back(c);
        }
    }
    std::vector<SweepRow> rows;
    for (const auto& c : runs) {
        const CampaignMetrics m = run_campaign(c);
        SweepRow row;
        row.label = axis == SweepAxis::TauP ? "tau_p=" + std::to_string(c.tau_p) : to_string(c.scheme);
        row.tau_p = c.tau_p;
        row.xi_p = m.pilot_reuse;
        row.scheme = c.scheme;
        row.mode = c.mode;
        row.median_user_se = m.median_user_se();
        row.mean_sum_se = m.mean_sum_se();
        row.min_user_se = m.min_user_se();
        rows.push_back(row);
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "# " << kCsvSchema << " sweep\n";
    os << "label,tau_p,xi_p,scheme,mode,median_user_se,mean_sum_se,min_user_se\n";
    for (const auto& r : rows)
        os << r.label << ',' << r.tau_p << ',' << fmt_num(r.xi_p) << ',' << to_string(r.scheme) << ','
           << to_string(r.mode) << ',' << fmt_num(r.median_user_se) << ',' << fmt_num(r.mean_sum_se) << ','
           << fmt_num(r.min_user_se) << '\n';
}

json metrics_json(const CampaignMetrics& m) {
    json j;
    j["pilot_reuse"] = m.pilot_reuse;
    j["pre_log"] = m.pre_log;
    j["median_user_se"] = m.median_user_se();
    j["min_user_se"] = m.min_user_se();
    j["mean_sum_se"] = m.mean_sum_se();
    json reals = json::array();
    for (std::size_t k = 0; k < m.realizations.size(); ++k) {
        const auto& r = m.realizations[k];
        int iters = 0;
        int unconverged = 0;
        for (const auto& s : r.slots) {
            iters += s.solver_iterations;
            if (!s.solver_converged) ++unconverged;
        }
        reals.push_back({{"index", r.index},
                         {"seed", r.seed},
                         {"users", r.num_users},
                         {"rrhs", r.num_rrh},
                         {"sum_se", m.sum_se(static_cast<int>(k))},
                         {"solver_iterations", iters},
                         {"unconverged_slots", unconverged}});
    }
    j["realizations"] = reals;
    return j;
}

namespace {

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << body;
}

template <typename Fn>
std::string render(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"User scheduling and robust beamforming for user-centric cell-free MIMO"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> scheme;
    std::optional<std::string> mode;
    std::optional<std::string> out_dir;
    std::string sweep_over = "scheme";

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON config file (defaults apply when omitted)");
        sub->add_option("--seed", seed, "Master seed");
        sub->add_option("--scheme", scheme, "proposed | ZF-optSched | ZF-RR | conjugate-RR");
        sub->add_option("--mode", mode, "PI | PEAR");
        sub->add_option("--out", out_dir, "Output directory");
    };
    CLI::App* campaign = app.add_subcommand("campaign", "Multi-slot campaign metrics");
    CLI::App* trace = app.add_subcommand("trace", "Per-iteration solver trace on one instance");
    CLI::App* sweep = app.add_subcommand("sweep", "Campaigns over tau_p or over schemes");
    for (CLI::App* s : {campaign, trace, sweep}) add_common(s);
    sweep->add_option("--over", sweep_over, "tau_p | scheme")->check(CLI::IsMember({"tau_p", "scheme"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        ExperimentConfig ec = config_path.empty() ? config_from_json(json::object()) : load_config(config_path);
        if (seed) ec.seed = *seed;
        if (scheme) ec.scheme = parse_scheme(*scheme);
        if (mode) ec.mode = parse_mode(*mode);
        ec.output_dir = resolve_output_dir(out_dir, std::getenv(kOutputDirEnv), ec.output_dir);
        ec.validate();
        const CampaignConfig cfg = ec.campaign();

        const fs::path dir(ec.output_dir);
        fs::create_directories(dir);

        json summary;
        summary["config"] = to_json(ec);
        summary["timestamp"] = timestamp_utc();
        std::string digest;

        if (campaign->parsed()) {
            const CampaignMetrics m = run_campaign(cfg);
            summary["subcommand"] = "campaign";
            summary["metrics"] = metrics_json(m);
            write_file(dir / "slots.csv", render([&](std::ostream& os) { write_slots_csv(os, m); }));
            write_file(dir / "users.csv", render([&](std::ostream& os) { write_users_csv(os, m); }));
            digest = "campaign scheme=" + to_string(cfg.scheme) + " mode=" + to_string(cfg.mode) +
                     " realizations=" + std::to_string(cfg.num_realizations) +
                     " median_user_se=" + fmt_num(m.median_user_se()) + " mean_sum_se=" + fmt_num(m.mean_sum_se()) +
                     " xi_p=" + fmt_num(m.pilot_reuse);
        } else if (trace->parsed()) {
            const TraceResult tr = run_trace(cfg);
            summary["subcommand"] = "trace";
            summary["trace"] = {{"iterations", tr.state.objective_trace.size()},
                                {"converged", tr.state.converged},
                                {"objective", tr.state.objective_trace.empty() ? 0.0 : tr.state.objective_trace.back()},
                                {"singular_warnings", tr.state.singular_warnings},
                                {"capacity_cap_hits", tr.state.capacity_cap_hits}};
            write_file(dir / "trace.csv", render([&](std::ostream& os) { write_trace_csv(os, tr); }));
            digest = "trace iterations=" + std::to_string(tr.state.objective_trace.size()) +
                     " converged=" + (tr.state.converged ? std::string("yes") : std::string("no")) +
                     " objective=" + fmt_num(tr.state.objective_trace.empty() ? 0.0 : tr.state.objective_trace.back());
        } else {
            const SweepAxis axis = sweep_over == "tau_p" ? SweepAxis::TauP : SweepAxis::Scheme;
            const std::vector<SweepRow> rows = run_sweep(cfg, axis);
            summary["subcommand"] = "sweep";
            summary["over"] = sweep_over;
            json jr = json::array();
            for (const auto& r : rows)
                jr.push_back({{"label", r.label},
                              {"tau_p", r.tau_p},
                              {"xi_p", r.xi_p},
                              {"median_user_se", r.median_user_se},
                              {"mean_sum_se", r.mean_sum_se},
                              {"min_user_se", r.min_user_se}});
            summary["rows"] = jr;
            write_file(dir / "sweep.csv", render([&](std::ostream& os) { write_sweep_csv(os, rows); }));
            digest = "sweep over=" + sweep_over;
            for (const auto& r : rows) digest += " " + r.label + ":" + fmt_num(r.mean_sum_se);
        }
        summary["digest"] = digest;
        write_file(dir / "summary.json", summary.dump(2) + "\n");
        out << digest << '\n';
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace cfsched
