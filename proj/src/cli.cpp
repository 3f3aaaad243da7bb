#include "earl/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "earl/controller.hpp"
#include "earl/csv.hpp"
#include "earl/rng.hpp"

namespace earl {

namespace {

namespace fs = std::filesystem;

constexpr const char* kToolVersion = "0.1.0";
constexpr std::uint64_t kTagTask = 0x7461736bULL;
constexpr std::uint64_t kTagProbe = 0x70726f6265ULL;

// Fixed shape of the built-in synthetic tasks; CSV datasets carry their own.
constexpr int kSynthSequences = 200;
constexpr int kSynthTimesteps = 50;

struct CliSettings {
    SearchSpace space;
    RunConfig run;
    EnergyModel energy;  // reference_energy resolved once the dataset is known
    EvalConfig eval;
    std::string task_kind = "freq_discrim";
    std::string task_csv;
    bool task_kind_set = false;
    bool task_csv_set = false;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
    throw ConfigError("invalid value for " + key + ": '" + value + "'");
}

double to_real(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return v;
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

int to_int(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(value, &pos);
        if (pos != value.size() || v < std::numeric_limits<int>::min() ||
            v > std::numeric_limits<int>::max()) {
            bad_value(key, value);
        }
        return static_cast<int>(v);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

std::uint64_t to_seed(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) bad_value(key, value);
        return static_cast<std::uint64_t>(v);
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception&) {
        bad_value(key, value);
    }
}

// Every recognized settings key, in manifest order.
const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "search.size_min",     "search.size_max",     "search.conn_min",
        "search.conn_max",     "search.spectral_min", "search.spectral_max",
        "search.leak_min",     "search.leak_max",     "run.total_trials",
        "run.n_init",          "run.seed",            "run.k",
        "reward.energy_weight", "rl.epsilon0",        "rl.kappa",
        "rl.epsilon_min",      "rl.gamma",            "rl.lr",
        "rl.capacity",         "rl.batch",            "rl.update_period",
        "rl.hidden",           "term.window",         "term.reward_tol",
        "term.energy_tol",     "energy.e_spike",      "energy.e_syn",
        "energy.e_leak",       "task.kind",           "task.csv",
        "readout.kind",        "readout.epochs",      "readout.batch_size",
    };
    return keys;
}

void apply_key(CliSettings& s, const std::string& key, const std::string& value) {
    if (key == "search.size_min") {
        s.space.size_range.lo = to_int(key, value);
    } else if (key == "search.size_max") {
        s.space.size_range.hi = to_int(key, value);
    } else if (key == "search.conn_min") {
        s.space.conn_range.lo = to_real(key, value);
    } else if (key == "search.conn_max") {
        s.space.conn_range.hi = to_real(key, value);
    } else if (key == "search.spectral_min") {
        s.space.spectral_range.lo = to_real(key, value);
    } else if (key == "search.spectral_max") {
        s.space.spectral_range.hi = to_real(key, value);
    } else if (key == "search.leak_min") {
        s.space.leak_range.lo = to_real(key, value);
    } else if (key == "search.leak_max") {
        s.space.leak_range.hi = to_real(key, value);
    } else if (key == "run.total_trials") {
        s.run.total_trials = to_int(key, value);
    } else if (key == "run.n_init") {
        s.run.n_init = to_int(key, value);
    } else if (key == "run.seed") {
        s.run.master_seed = to_seed(key, value);
        s.eval.master_seed = s.run.master_seed;
    } else if (key == "run.k") {
        s.run.acquisition.batch_size = to_int(key, value);
    } else if (key == "reward.energy_weight") {
        s.run.reward.energy_weight = to_real(key, value);
    } else if (key == "rl.epsilon0") {
        s.run.rl.epsilon0 = to_real(key, value);
    } else if (key == "rl.kappa") {
        s.run.rl.kappa = to_real(key, value);
    } else if (key == "rl.epsilon_min") {
        s.run.rl.epsilon_min = to_real(key, value);
    } else if (key == "rl.gamma") {
        s.run.rl.gamma = to_real(key, value);
    } else if (key == "rl.lr") {
        s.run.rl.learning_rate = to_real(key, value);
    } else if (key == "rl.capacity") {
        s.run.rl.capacity = to_int(key, value);
    } else if (key == "rl.batch") {
        s.run.rl.batch = to_int(key, value);
    } else if (key == "rl.update_period") {
        s.run.rl.update_period = to_int(key, value);
    } else if (key == "rl.hidden") {
        s.run.rl.hidden = to_int(key, value);
    } else if (key == "term.window") {
        s.run.termination.window = to_int(key, value);
    } else if (key == "term.reward_tol") {
        s.run.termination.reward_tol = to_real(key, value);
    } else if (key == "term.energy_tol") {
        s.run.termination.energy_tol = to_real(key, value);
    } else if (key == "energy.e_spike") {
        s.energy.e_spike = to_real(key, value);
    } else if (key == "energy.e_syn") {
        s.energy.e_syn = to_real(key, value);
    } else if (key == "energy.e_leak") {
        s.energy.e_leak = to_real(key, value);
    } else if (key == "task.kind") {
        parse_task_kind(value);  // reject bad names early
        s.task_kind = value;
        s.task_kind_set = true;
    } else if (key == "task.csv") {
        if (value.empty()) bad_value(key, value);
        s.task_csv = value;
        s.task_csv_set = true;
    } else if (key == "readout.kind") {
        s.eval.readout = parse_readout_kind(value);
    } else if (key == "readout.epochs") {
        s.eval.train_spec.epochs = to_int(key, value);
    } else if (key == "readout.batch_size") {
        s.eval.train_spec.batch_size = to_int(key, value);
    } else {
        throw ConfigError("unknown config key: " + key);
    }
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Flat key=value lines; '#' starts a comment, blank lines are skipped.
KeyValues parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KeyValues entries;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        entries.emplace_back(key, value);
    }
    return entries;
}

KeyValues parse_set_overrides(const std::vector<std::string>& sets) {
    KeyValues entries;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw ConfigError("override must look like key=value: '" + s + "'");
        }
        entries.emplace_back(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    return entries;
}

CliSettings resolve_settings(const std::string& config_path, const KeyValues& overrides) {
    CliSettings s;
    if (!config_path.empty()) {
        for (const auto& [key, value] : parse_config_file(config_path)) {
            apply_key(s, key, value);
        }
    }
    for (const auto& [key, value] : overrides) apply_key(s, key, value);
    if (s.task_kind_set && s.task_csv_set) {
        throw ConfigError("task.kind and task.csv are mutually exclusive");
    }
    s.space.validate();
    s.run.validate();
    s.energy.validate();
    if (s.eval.train_spec.epochs < 1) throw ConfigError("readout.epochs must be >= 1");
    if (s.eval.train_spec.batch_size < 1) throw ConfigError("readout.batch_size must be >= 1");
    return s;
}

TaskDataset load_dataset(const CliSettings& s) {
    if (s.task_csv_set) {
        if (!fs::exists(s.task_csv)) {
            throw ConfigError("dataset file not found: " + s.task_csv);
        }
        return ingest_csv(s.task_csv);
    }
    return synth_task(parse_task_kind(s.task_kind), kSynthSequences, kSynthTimesteps,
                      derive_seed(s.run.master_seed, kTagTask));
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) { return csv::format_double(v); }

// Every setting the run actually used, written flat so a follow-up run can
// be reproduced from the manifest alone.
std::string manifest_text(const CliSettings& s, const TaskDataset& data) {
    std::ostringstream o;
    o << "tool_version=" << kToolVersion << '\n';
    o << "timestamp=" << utc_timestamp() << '\n';
    o << "search.size_min=" << s.space.size_range.lo << '\n';
    o << "search.size_max=" << s.space.size_range.hi << '\n';
    o << "search.conn_min=" << fmt(s.space.conn_range.lo) << '\n';
    o << "search.conn_max=" << fmt(s.space.conn_range.hi) << '\n';
    o << "search.spectral_min=" << fmt(s.space.spectral_range.lo) << '\n';
    o << "search.spectral_max=" << fmt(s.space.spectral_range.hi) << '\n';
    o << "search.leak_min=" << fmt(s.space.leak_range.lo) << '\n';
    o << "search.leak_max=" << fmt(s.space.leak_range.hi) << '\n';
    o << "run.total_trials=" << s.run.total_trials << '\n';
    o << "run.n_init=" << s.run.n_init << '\n';
    o << "run.seed=" << s.run.master_seed << '\n';
    o << "run.k=" << s.run.acquisition.batch_size << '\n';
    o << "run.full_batch=" << (s.run.evaluate_full_batch ? 1 : 0) << '\n';
    o << "run.workers=" << s.run.parallel_eval_workers << '\n';
    o << "run.collect_wall_time=" << (s.run.collect_wall_time ? 1 : 0) << '\n';
    o << "reward.energy_weight=" << fmt(s.run.reward.energy_weight) << '\n';
    o << "rl.epsilon0=" << fmt(s.run.rl.epsilon0) << '\n';
    o << "rl.kappa=" << fmt(s.run.rl.kappa) << '\n';
    o << "rl.epsilon_min=" << fmt(s.run.rl.epsilon_min) << '\n';
    o << "rl.gamma=" << fmt(s.run.rl.gamma) << '\n';
    o << "rl.lr=" << fmt(s.run.rl.learning_rate) << '\n';
    o << "rl.capacity=" << s.run.rl.capacity << '\n';
    o << "rl.batch=" << s.run.rl.batch << '\n';
    o << "rl.update_period=" << s.run.rl.update_period << '\n';
    o << "rl.hidden=" << s.run.rl.hidden << '\n';
    o << "term.window=" << s.run.termination.window << '\n';
    o << "term.reward_tol=" << fmt(s.run.termination.reward_tol) << '\n';
    o << "term.energy_tol=" << fmt(s.run.termination.energy_tol) << '\n';
    o << "energy.e_spike=" << fmt(s.energy.e_spike) << '\n';
    o << "energy.e_syn=" << fmt(s.energy.e_syn) << '\n';
    o << "energy.e_leak=" << fmt(s.energy.e_leak) << '\n';
    o << "energy.reference=" << fmt(s.energy.reference_energy) << '\n';
    if (s.task_csv_set) {
        o << "task.csv=" << s.task_csv << '\n';
    } else {
        o << "task.kind=" << s.task_kind << '\n';
    }
    o << "readout.kind=" << readout_kind_name(s.eval.readout) << '\n';
    o << "readout.epochs=" << s.eval.train_spec.epochs << '\n';
    o << "readout.batch_size=" << s.eval.train_spec.batch_size << '\n';
    o << "acquisition.pool_size=" << s.run.acquisition.pool_size << '\n';
    o << "acquisition.dup_tolerance=" << fmt(s.run.acquisition.dup_tolerance) << '\n';
    o << "acquisition.jitter_sigma=" << fmt(s.run.acquisition.jitter_sigma) << '\n';
    o << "dataset.sequences=" << data.features.size() << '\n';
    o << "dataset.features=" << data.n_features() << '\n';
    o << "dataset.timesteps=" << data.max_timesteps() << '\n';
    o << "dataset.classes=" << data.class_count << '\n';
    return o.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << content;
    if (!out.flush()) throw std::runtime_error("write failed: " + path.string());
}

std::string summary_text(const CliSettings& s, const RunResult& res) {
    const TrialLog& log = res.log;
    const RunSummary& sum = res.summary;
    std::ostringstream o;
    o << "best_reward=" << fmt(sum.incumbent.best_reward) << '\n';
    o << "best_trial=" << sum.incumbent.best_index << '\n';
    if (sum.incumbent.best_index >= 0) {
        const TrialRecord& best = log[static_cast<std::size_t>(sum.incumbent.best_index)];
        o << "best.reservoir_size=" << best.config.reservoir_size << '\n';
        o << "best.connectivity=" << fmt(best.config.connectivity) << '\n';
        o << "best.spectral_radius=" << fmt(best.config.spectral_radius) << '\n';
        o << "best.leak_rate=" << fmt(best.config.leak_rate) << '\n';
        o << "best.accuracy=" << fmt(best.objectives.accuracy) << '\n';
        o << "best.energy_pj_per_sample=" << fmt(best.objectives.energy_pj_per_sample) << '\n';
        o << "best.energy_normalized=" << fmt(best.objectives.energy_normalized) << '\n';
    }
    o << "min_energy_normalized=" << fmt(sum.incumbent.min_energy) << '\n';
    o << "min_energy_trial=" << sum.incumbent.min_energy_index << '\n';
    o << "termination_reason=" << sum.termination_reason << '\n';
    o << "sobol_trials=" << sum.sobol_trials << '\n';
    o << "earl_trials=" << sum.earl_trials << '\n';
    o << "total_trials=" << log.size() << '\n';
    o << "pareto_size=" << sum.pareto.size() << '\n';
    o << "energy_weight=" << fmt(s.run.reward.energy_weight) << '\n';
    o << "total_wall_time_s=" << fmt(sum.total_wall_time_s) << '\n';
    return o.str();
}

struct OptimizeFlags {
    std::string out_dir = "earl_run";
    int workers = 1;
    bool full_batch = false;
    bool collect_wall_time = false;
    bool quiet = false;
};

int cmd_optimize(const std::string& config_path, const KeyValues& overrides,
                 const OptimizeFlags& flags) {
    CliSettings s = resolve_settings(config_path, overrides);
    // invocation details, not config keys: they ride on the settings directly
    s.run.parallel_eval_workers = flags.workers;
    s.run.evaluate_full_batch = flags.full_batch;
    s.run.collect_wall_time = flags.collect_wall_time;
    s.run.validate();
    const TaskDataset data = load_dataset(s);
    s.energy.reference_energy = reference_energy_for(s.space, data.max_timesteps(),
                                                     data.n_features(), s.energy);
    s.energy.validate();

    // All validation is done; only now may anything touch the filesystem.
    fs::create_directories(flags.out_dir);

    RunHooks hooks;
    if (!flags.quiet) {
        hooks.on_trial = [](const TrialRecord& r) {
            std::cerr << "trial " << r.index << " [" << phase_name(r.phase)
                      << "] reward=" << fmt(r.reward)
                      << " accuracy=" << fmt(r.objectives.accuracy)
                      << " energy=" << fmt(r.objectives.energy_pj_per_sample) << " pJ/sample\n";
        };
        hooks.on_termination = [](const std::string& why) {
            std::cerr << "early termination: " << why << '\n';
        };
    }

    const RunResult res = run_optimization(s.run, s.space, data, s.eval, s.energy, hooks);

    const fs::path dir(flags.out_dir);
    write_trial_csv(res.log, (dir / "trials.csv").string());
    {
        std::ostringstream o;
        o << kTrialCsvHeader << '\n';
        for (int idx : res.summary.pareto) {
            write_trial_row(o, res.log[static_cast<std::size_t>(idx)]);
        }
        write_text_file(dir / "pareto.csv", o.str());
    }
    write_text_file(dir / "summary.txt", summary_text(s, res));
    write_text_file(dir / "manifest.txt", manifest_text(s, data));

    std::cout << "wrote " << (dir / "trials.csv").string() << '\n'
              << "wrote " << (dir / "pareto.csv").string() << '\n'
              << "wrote " << (dir / "summary.txt").string() << '\n'
              << "wrote " << (dir / "manifest.txt").string() << '\n'
              << "best_reward=" << fmt(res.summary.incumbent.best_reward)
              << " termination=" << res.summary.termination_reason << '\n';
    return 0;
}

int cmd_evaluate(const std::string& config_path, const KeyValues& overrides, int size,
                 double conn, double spectral, double leak) {
    CliSettings s = resolve_settings(config_path, overrides);
    const Configuration c{size, conn, spectral, leak};
    if (!in_space(c, s.space)) {
        std::ostringstream o;
        o << "configuration out of bounds: size=" << size << " conn=" << fmt(conn)
          << " spectral=" << fmt(spectral) << " leak=" << fmt(leak);
        throw ConfigError(o.str());
    }
    const TaskDataset data = load_dataset(s);
    s.energy.reference_energy = reference_energy_for(s.space, data.max_timesteps(),
                                                     data.n_features(), s.energy);
    s.energy.validate();

    const EvalOutcome out =
        evaluate(c, data, s.eval, s.energy, derive_seed(s.run.master_seed, kTagProbe));
    if (out.failed) std::cerr << "evaluation failed (" << out.message << "); worst-case values\n";
    std::cout << "accuracy=" << fmt(out.values.accuracy) << '\n'
              << "energy_pj_per_sample=" << fmt(out.values.energy_pj_per_sample) << '\n'
              << "energy_normalized=" << fmt(out.values.energy_normalized) << '\n'
              << "reward=" << fmt(compute_reward(out.values, s.run.reward)) << '\n';
    return 0;
}

std::vector<std::string> split_header(const std::string& header) {
    std::vector<std::string> names;
    std::string cur;
    for (char ch : header) {
        if (ch == ',') {
            names.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    names.push_back(cur);
    return names;
}

int cmd_report(const std::string& trials_path, std::string out_dir) {
    if (!fs::exists(trials_path)) {
        throw ConfigError("trials file not found: " + trials_path);
    }
    const csv::Table table = csv::read_file(trials_path);
    {
        const std::vector<std::string> expected = split_header(kTrialCsvHeader);
        std::string missing;
        for (const std::string& name : expected) {
            if (table.column(name) < 0) {
                if (!missing.empty()) missing += ", ";
                missing += name;
            }
        }
        if (!missing.empty()) throw SchemaError("missing columns: " + missing);
        if (table.header != expected) {
            throw SchemaError("column order differs from the trials.csv schema");
        }
    }

    // The log rechecks reward = accuracy - w * energy_normalized on load, so
    // recover w from the first row where the energy term is visible.
    RewardParams params;
    try {
        const int ca = table.column("accuracy");
        const int cn = table.column("energy_normalized");
        const int cr = table.column("reward");
        for (const auto& row : table.rows) {
            const double e_norm = std::stod(row[static_cast<std::size_t>(cn)]);
            if (std::abs(e_norm) > 1e-12) {
                const double acc = std::stod(row[static_cast<std::size_t>(ca)]);
                const double reward = std::stod(row[static_cast<std::size_t>(cr)]);
                params.energy_weight = (acc - reward) / e_norm;
                break;
            }
        }
    } catch (const std::exception&) {
        throw SchemaError("non-numeric value in trials file");
    }

    TrialLog log;
    try {
        log = read_trial_csv(trials_path, params);
    } catch (const std::invalid_argument& e) {
        throw SchemaError(std::string("trials file is not a consistent run log: ") + e.what());
    }

    if (out_dir.empty()) {
        const fs::path parent = fs::path(trials_path).parent_path();
        out_dir = parent.empty() ? std::string(".") : parent.string();
    }
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    std::ostringstream acc_out;
    std::ostringstream en_out;
    acc_out << "trial_index,accuracy,best_accuracy\n";
    en_out << "trial_index,energy_pj_per_sample,best_energy_pj_per_sample\n";
    double best_acc = -std::numeric_limits<double>::infinity();
    double best_en = std::numeric_limits<double>::infinity();
    for (const TrialRecord& r : log.records()) {
        best_acc = std::max(best_acc, r.objectives.accuracy);
        best_en = std::min(best_en, r.objectives.energy_pj_per_sample);
        acc_out << r.index << ',' << fmt(r.objectives.accuracy) << ',' << fmt(best_acc) << '\n';
        en_out << r.index << ',' << fmt(r.objectives.energy_pj_per_sample) << ','
               << fmt(best_en) << '\n';
    }

    std::ostringstream par_out;
    par_out << "trial_index,accuracy,energy_pj_per_sample\n";
    if (!log.empty()) {
        for (int idx : pareto_front(log)) {
            const TrialRecord& r = log[static_cast<std::size_t>(idx)];
            par_out << r.index << ',' << fmt(r.objectives.accuracy) << ','
                    << fmt(r.objectives.energy_pj_per_sample) << '\n';
        }
    }

    write_text_file(dir / "accuracy_vs_trial.csv", acc_out.str());
    write_text_file(dir / "energy_vs_trial.csv", en_out.str());
    write_text_file(dir / "pareto_vs_all.csv", par_out.str());
    std::cout << "wrote " << (dir / "accuracy_vs_trial.csv").string() << '\n'
              << "wrote " << (dir / "energy_vs_trial.csv").string() << '\n'
              << "wrote " << (dir / "pareto_vs_all.csv").string() << '\n';
    return 0;
}

// Registers one string option per settings key so any of them can be
// overridden directly, e.g. --run.seed 7.
void add_key_overrides(CLI::App* cmd, KeyValues& out) {
    for (const std::string& key : config_keys()) {
        cmd->add_option_function<std::string>(
               "--" + key, [&out, key](const std::string& v) { out.emplace_back(key, v); })
            ->group("Config key overrides");
    }
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"energy-aware hyperparameter search for liquid state machines"};
    app.require_subcommand(1);

    std::string opt_config, opt_out = "earl_run";
    std::vector<std::string> opt_sets;
    KeyValues opt_keys;
    int opt_workers = 1;
    bool opt_full_batch = false;
    bool opt_time = false;
    bool opt_quiet = false;
    CLI::App* optimize = app.add_subcommand("optimize", "run the full optimization loop");
    optimize->add_option("-c,--config", opt_config, "flat key=value settings file");
    optimize->add_option("-o,--out", opt_out, "output directory (default earl_run)");
    optimize->add_option("--set", opt_sets, "override a setting, KEY=VALUE (repeatable)");
    optimize->add_option("--workers", opt_workers, "parallel evaluation threads");
    optimize->add_flag("--full-batch", opt_full_batch, "evaluate every proposed candidate");
    optimize->add_flag("--time", opt_time,
                       "record per-trial wall time (trials.csv stops being byte-stable)");
    optimize->add_flag("-q,--quiet", opt_quiet, "suppress per-trial progress output");
    add_key_overrides(optimize, opt_keys);

    std::string eval_config;
    std::vector<std::string> eval_sets;
    KeyValues eval_keys;
    int eval_size = 0;
    double eval_conn = 0.0, eval_spectral = 0.0, eval_leak = 0.0;
    CLI::App* evaluate_cmd = app.add_subcommand("evaluate", "score one configuration");
    evaluate_cmd->add_option("-c,--config", eval_config, "flat key=value settings file");
    evaluate_cmd->add_option("--set", eval_sets, "override a setting, KEY=VALUE (repeatable)");
    evaluate_cmd->add_option("--size", eval_size, "reservoir size")->required();
    evaluate_cmd->add_option("--conn", eval_conn, "connectivity")->required();
    evaluate_cmd->add_option("--spectral", eval_spectral, "spectral radius")->required();
    evaluate_cmd->add_option("--leak", eval_leak, "leak rate")->required();
    add_key_overrides(evaluate_cmd, eval_keys);

    std::string report_trials, report_out;
    CLI::App* report = app.add_subcommand("report", "emit plot-ready series from a trials.csv");
    report->add_option("trials", report_trials, "path to trials.csv")->required();
    report->add_option("-o,--out", report_out, "output directory (default: alongside input)");

    std::vector<const char*> argv;
    argv.reserve(args.size() + 1);
    argv.push_back("earl");
    for (const std::string& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // bad invocation is a configuration error
    }

    try {
        if (optimize->parsed()) {
            KeyValues overrides = parse_set_overrides(opt_sets);
            overrides.insert(overrides.end(), opt_keys.begin(), opt_keys.end());
            OptimizeFlags flags;
            flags.out_dir = opt_out;
            flags.workers = opt_workers;
            flags.full_batch = opt_full_batch;
            flags.collect_wall_time = opt_time;
            flags.quiet = opt_quiet;
            return cmd_optimize(opt_config, overrides, flags);
        }
        if (evaluate_cmd->parsed()) {
            KeyValues overrides = parse_set_overrides(eval_sets);
            overrides.insert(overrides.end(), eval_keys.begin(), eval_keys.end());
            return cmd_evaluate(eval_config, overrides, eval_size, eval_conn, eval_spectral,
                                eval_leak);
        }
        if (report->parsed()) {
            return cmd_report(report_trials, report_out);
        }
        std::cerr << "no command given\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const SchemaError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

}  // namespace earl
