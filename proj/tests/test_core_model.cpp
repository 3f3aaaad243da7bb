#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "earl/rng.hpp"
#include "earl/trial_log.hpp"

using namespace earl;

namespace {

TrialRecord make_record(int index, double acc, double energy_pj, double energy_norm,
                        const RewardParams& params) {
    TrialRecord r;
    r.index = index;
    r.config = {100 + index, 0.3, 0.9, 0.2};
    r.objectives = {acc, energy_pj, energy_norm};
    r.reward = compute_reward(r.objectives, params);
    r.seed = 1000 + static_cast<std::uint64_t>(index);
    return r;
}

// Log whose rewards equal accuracy, so objective values can be set freely.
TrialLog make_log(const std::vector<double>& accs, const std::vector<double>& energies_pj,
                  const std::vector<double>& energies_norm) {
    RewardParams params;
    params.energy_weight = 0.0;
    TrialLog log(params);
    for (std::size_t i = 0; i < accs.size(); ++i) {
        log.append(make_record(static_cast<int>(i), accs[i], energies_pj[i], energies_norm[i],
                               params));
    }
    return log;
}

bool dominates(double acc_a, double en_a, double acc_b, double en_b) {
    return acc_a >= acc_b && en_a <= en_b && (acc_a > acc_b || en_a < en_b);
}

std::vector<int> brute_force_front(const TrialLog& log) {
    std::vector<int> front;
    const auto& recs = log.records();
    for (std::size_t i = 0; i < recs.size(); ++i) {
        bool dominated = false;
        for (std::size_t j = 0; j < recs.size() && !dominated; ++j) {
            if (i == j) continue;
            dominated = dominates(recs[j].objectives.accuracy,
                                  recs[j].objectives.energy_pj_per_sample,
                                  recs[i].objectives.accuracy,
                                  recs[i].objectives.energy_pj_per_sample);
        }
        if (!dominated) front.push_back(static_cast<int>(i));
    }
    return front;
}

std::vector<int> sorted(std::vector<int> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("compute_reward arithmetic") {
    CHECK(compute_reward(0.9, 0.2, RewardParams{0.0}) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(compute_reward(0.9, 0.2, RewardParams{0.5}) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(compute_reward(0.0, 1.0, RewardParams{1.0}) == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("compute_reward rejects non-finite input") {
    const double nan = std::nan("");
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(compute_reward(nan, 0.2, RewardParams{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(compute_reward(0.9, inf, RewardParams{0.5}), std::invalid_argument);
    CHECK_THROWS_AS(compute_reward(0.9, 0.2, RewardParams{nan}), std::invalid_argument);
    CHECK_THROWS_AS(compute_reward(0.9, 0.2, RewardParams{-0.1}), std::invalid_argument);
}

TEST_CASE("compute_reward monotonicity") {
    const RewardParams params{0.7};
    double prev = -10.0;
    for (int i = 0; i <= 10; ++i) {
        const double r = compute_reward(i / 10.0, 0.5, params);
        CHECK(r > prev);
        prev = r;
    }
    prev = 10.0;
    for (int i = 0; i <= 10; ++i) {
        const double r = compute_reward(0.5, i / 10.0, params);
        CHECK(r <= prev);
        prev = r;
    }
}

TEST_CASE("update_incumbent tie-break and split objectives") {
    SUBCASE("first occurrence wins ties") {
        const TrialLog log = make_log({0.5, 0.8, 0.8}, {1, 1, 1}, {0.1, 0.1, 0.1});
        const Incumbent inc = update_incumbent(log);
        CHECK(inc.best_index == 1);
        CHECK(inc.best_reward == doctest::Approx(0.8).epsilon(1e-15));
    }
    SUBCASE("singleton") {
        const TrialLog log = make_log({0.3}, {5.0}, {0.1});
        const Incumbent inc = update_incumbent(log);
        CHECK(inc.best_reward == doctest::Approx(0.3).epsilon(1e-15));
        CHECK(inc.min_energy == doctest::Approx(0.1).epsilon(1e-15));
        CHECK(inc.best_index == 0);
        CHECK(inc.min_energy_index == 0);
    }
    SUBCASE("objectives held by different trials") {
        const TrialLog log = make_log({0.2, 0.9}, {1, 2}, {0.05, 0.5});
        const Incumbent inc = update_incumbent(log);
        CHECK(inc.best_index == 1);
        CHECK(inc.min_energy_index == 0);
    }
    SUBCASE("empty log rejected") {
        const TrialLog log;
        CHECK_THROWS_AS(update_incumbent(log), std::invalid_argument);
    }
}

TEST_CASE("incumbent best_reward is non-decreasing under appends") {
    RewardParams params;
    params.energy_weight = 0.0;
    TrialLog log(params);
    Rng rng(123);
    double prev_best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 100; ++i) {
        log.append(make_record(i, rng.uniform01(), rng.uniform(0, 10), rng.uniform01(), params));
        const Incumbent inc = update_incumbent(log);
        CHECK(inc.best_reward >= prev_best);
        prev_best = inc.best_reward;
    }
}

TEST_CASE("pareto_front hand examples") {
    SUBCASE("four points, one dominated") {
        const TrialLog log =
            make_log({0.9, 0.95, 0.9, 0.8}, {0.2, 0.3, 0.25, 0.1}, {0, 0, 0, 0});
        const std::vector<int> front = pareto_front(log);
        CHECK(front == std::vector<int>{1, 0, 3});  // descending accuracy
    }
    SUBCASE("single point") {
        const TrialLog log = make_log({0.5}, {0.7}, {0});
        CHECK(pareto_front(log) == std::vector<int>{0});
    }
    SUBCASE("duplicate objective pairs are all retained") {
        const TrialLog log = make_log({0.9, 0.9}, {0.2, 0.2}, {0, 0});
        CHECK(pareto_front(log) == std::vector<int>{0, 1});
    }
    SUBCASE("empty log rejected") {
        const TrialLog log;
        CHECK_THROWS_AS(pareto_front(log), std::invalid_argument);
    }
}

TEST_CASE("pareto_front matches brute-force dominance oracle") {
    Rng rng(987654321);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> accs, energies, norms;
        const int n = 1 + static_cast<int>(rng.uniform_int(80));
        for (int i = 0; i < n; ++i) {
            // coarse grid so duplicate pairs and ties actually occur
            accs.push_back(std::round(rng.uniform01() * 20) / 20.0);
            energies.push_back(std::round(rng.uniform(0, 10) * 4) / 4.0);
            norms.push_back(0.0);
        }
        const TrialLog log = make_log(accs, energies, norms);
        CHECK(sorted(pareto_front(log)) == sorted(brute_force_front(log)));
    }
}

TEST_CASE("accuracy shift moves every reward by the same constant") {
    const RewardParams params{0.3};
    TrialLog base(params);
    TrialLog shifted(params);
    Rng rng(77);
    const double c = 0.25;
    for (int i = 0; i < 40; ++i) {
        const double acc = rng.uniform(0.0, 0.7);
        const double e_norm = rng.uniform01();
        base.append(make_record(i, acc, e_norm * 5, e_norm, params));
        shifted.append(make_record(i, acc + c, e_norm * 5, e_norm, params));
    }
    for (int i = 0; i < 40; ++i) {
        CHECK(shifted[i].reward - base[i].reward == doctest::Approx(c).epsilon(1e-12));
    }
    CHECK(update_incumbent(base).best_index == update_incumbent(shifted).best_index);
}

TEST_CASE("trial log enforces dense indices and recomputable rewards") {
    RewardParams params{0.5};
    TrialLog log(params);
    log.append(make_record(0, 0.9, 10, 0.2, params));

    TrialRecord gap = make_record(2, 0.5, 1, 0.1, params);
    CHECK_THROWS_AS(log.append(gap), std::invalid_argument);

    TrialRecord bad = make_record(1, 0.5, 1, 0.1, params);
    bad.reward += 1e-6;
    CHECK_THROWS_AS(log.append(bad), std::invalid_argument);

    log.append(make_record(1, 0.5, 1, 0.1, params));
    CHECK(log.size() == 2);
}

TEST_CASE("trial csv header and round-trip") {
    CHECK(std::string(kTrialCsvHeader) ==
          "trial_index,phase,selected_by,reservoir_size,connectivity,spectral_radius,"
          "leak_rate,accuracy,energy_pj_per_sample,energy_normalized,reward,wall_time_s,seed");

    RewardParams params{0.5};
    TrialLog log(params);
    for (int i = 0; i < 5; ++i) {
        TrialRecord r = make_record(i, 0.1 + 0.2 * i, 1.0 / 3.0 + i, 0.01 * i, params);
        r.phase = i < 2 ? Phase::sobol : Phase::earl;
        r.selected_by = i < 2 ? SelectedBy::sobol
                              : (i % 2 ? SelectedBy::rl_greedy : SelectedBy::rl_random);
        r.config.connectivity = 0.1 + 0.0001 * i;
        r.wall_time_s = 0.0;
        log.append(r);
    }

    const std::string path =
        (std::filesystem::temp_directory_path() / "earl_core_roundtrip.csv").string();
    write_trial_csv(log, path);
    const TrialLog back = read_trial_csv(path, params);
    REQUIRE(back.size() == log.size());
    for (std::size_t i = 0; i < log.size(); ++i) {
        CHECK(back[i].index == log[i].index);
        CHECK(back[i].config == log[i].config);
        CHECK(back[i].objectives.accuracy == log[i].objectives.accuracy);
        CHECK(back[i].objectives.energy_pj_per_sample == log[i].objectives.energy_pj_per_sample);
        CHECK(back[i].objectives.energy_normalized == log[i].objectives.energy_normalized);
        CHECK(back[i].reward == log[i].reward);
        CHECK(back[i].phase == log[i].phase);
        CHECK(back[i].selected_by == log[i].selected_by);
        CHECK(back[i].seed == log[i].seed);
    }
    std::filesystem::remove(path);
}

TEST_CASE("trial csv rejects a wrong header") {
    const std::string path =
        (std::filesystem::temp_directory_path() / "earl_core_badheader.csv").string();
    {
        std::ofstream out(path);
        out << "trial_index,phase\n0,sobol\n";
    }
    CHECK_THROWS_AS(read_trial_csv(path, RewardParams{}), SchemaError);
    std::filesystem::remove(path);
}

TEST_CASE("phase and selector names round-trip") {
    CHECK(parse_phase(phase_name(Phase::sobol)) == Phase::sobol);
    CHECK(parse_phase(phase_name(Phase::earl)) == Phase::earl);
    CHECK(parse_selected_by(selected_by_name(SelectedBy::sobol)) == SelectedBy::sobol);
    CHECK(parse_selected_by(selected_by_name(SelectedBy::rl_greedy)) == SelectedBy::rl_greedy);
    CHECK(parse_selected_by(selected_by_name(SelectedBy::rl_random)) == SelectedBy::rl_random);
    CHECK_THROWS_AS(parse_phase("bogus"), SchemaError);
    CHECK_THROWS_AS(parse_selected_by("bogus"), SchemaError);
}
