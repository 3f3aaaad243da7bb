#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "earl/dataset.hpp"
#include "earl/evaluator.hpp"
#include "earl/readout.hpp"
#include "earl/rng.hpp"
#include "earl/search_space.hpp"
#include "earl/types.hpp"

using namespace earl;

namespace {

std::filesystem::path write_temp_csv(const std::string& name, const std::string& body) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << body;
    out.close();
    return path;
}

// 10 sequences (2 timesteps each), 2 balanced classes, 2 features.
std::string balanced_csv() {
    std::ostringstream out;
    out << "seq_id,t,label,f0,f1\n";
    for (int i = 0; i < 10; ++i) {
        const int label = i % 2;
        for (int t = 0; t < 2; ++t)
            out << "s" << i << "," << t << "," << label << "," << (0.1 * i + t) << ","
            << (i - 0.5 * t) << "\n";
    }
    return out.str();
}

TaskDataset zero_input_dataset(int s, int t, int d) {
    TaskDataset data;
    data.class_count = 2;
    for (int i = 0; i < s; ++i) {
        data.features.push_back(Mat::Zero(t, d));
        data.labels.push_back(i % 2);
        (i % 5 == 0 ? data.val_idx : data.train_idx).push_back(i);
    }
    data.feature_mean = Vec::Zero(d);
    data.feature_std = Vec::Ones(d);
    return data;
}

double flat_ridge_accuracy(const TaskDataset& data, double lambda) {
    const int t = static_cast<int>(data.features[0].rows());
    Mat train(static_cast<Eigen::Index>(data.train_idx.size()), t);
    std::vector<int> train_labels;
    for (std::size_t r = 0; r < data.train_idx.size(); ++r) {
        const int i = data.train_idx[r];
        train.row(static_cast<Eigen::Index>(r)) = data.features[i].col(0).transpose();
        train_labels.push_back(data.labels[i]);
    }
    const RidgeReadout readout = ridge_readout(train, train_labels, lambda);
    int correct = 0;
    for (int i : data.val_idx)
        if (readout.predict(data.features[i].col(0)) == data.labels[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(data.val_idx.size());
}

}  // namespace

TEST_CASE("ingest_csv splits 10 balanced sequences with one of each class in validation") {
    const auto path = write_temp_csv("earl_balanced.csv", balanced_csv());
    const TaskDataset data = ingest_csv(path.string());

    CHECK(data.features.size() == 10);
    CHECK(data.labels.size() == 10);
    CHECK(data.class_count == 2);
    CHECK(data.n_features() == 2);
    REQUIRE(data.val_idx.size() == 2);
    CHECK(data.train_idx.size() == 8);
    const int val_class_sum = data.labels[data.val_idx[0]] + data.labels[data.val_idx[1]];
    CHECK(val_class_sum == 1);  // exactly one sequence of each class

    // Train and val indices partition [0, 10).
    std::vector<int> all = data.train_idx;
    all.insert(all.end(), data.val_idx.begin(), data.val_idx.end());
    std::sort(all.begin(), all.end());
    for (int i = 0; i < 10; ++i) CHECK(all[static_cast<std::size_t>(i)] == i);

    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv z-scores with training statistics only") {
    const auto path = write_temp_csv("earl_zscore.csv", balanced_csv());
    const TaskDataset data = ingest_csv(path.string());

    const int d = data.n_features();
    Vec mean = Vec::Zero(d), sq = Vec::Zero(d);
    long count = 0;
    for (int i : data.train_idx) {
        mean += data.features[i].colwise().sum().transpose();
        sq += data.features[i].array().square().colwise().sum().matrix().transpose();
        count += data.features[i].rows();
    }
    mean /= static_cast<double>(count);
    for (int j = 0; j < d; ++j) {
        const double var = sq[j] / static_cast<double>(count) - mean[j] * mean[j];
        CHECK(std::abs(mean[j]) <= 1e-6);
        CHECK(std::abs(std::sqrt(var) - 1.0) <= 1e-6);
    }
    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv orders rows by the time column") {
    // Same sequence delivered in reverse time order must come out sorted.
    std::string body = "seq_id,t,label,x\n";
    for (int i = 0; i < 10; ++i) {
        const int label = i % 2;
        for (int t = 2; t >= 0; --t)
            body += "q" + std::to_string(i) + "," + std::to_string(t) + "," +
                    std::to_string(label) + "," + std::to_string(i + 10 * t) + "\n";
    }
    const auto path = write_temp_csv("earl_order.csv", body);
    const TaskDataset data = ingest_csv(path.string());
    for (const Mat& seq : data.features) {
        REQUIRE(seq.rows() == 3);
        CHECK(seq(0, 0) < seq(1, 0));  // z-scoring preserves order
        CHECK(seq(1, 0) < seq(2, 0));
    }
    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv clamps a constant feature to zero and warns") {
    std::string body = "seq_id,t,label,steady,live\n";
    for (int i = 0; i < 10; ++i)
        for (int t = 0; t < 3; ++t)
            body += "s" + std::to_string(i) + "," + std::to_string(t) + "," +
                    std::to_string(i % 2) + ",7.5," + std::to_string(i + 0.3 * t) + "\n";
    const auto path = write_temp_csv("earl_const.csv", body);

    std::ostringstream captured;
    std::streambuf* old = std::cerr.rdbuf(captured.rdbuf());
    const TaskDataset data = ingest_csv(path.string());
    std::cerr.rdbuf(old);

    CHECK(captured.str().find("warning") != std::string::npos);
    CHECK(data.feature_std[0] == 1.0);
    for (const Mat& seq : data.features) CHECK(seq.col(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(data.features[0].col(1).cwiseAbs().maxCoeff() > 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv is deterministic across re-ingestion") {
    const auto path = write_temp_csv("earl_redo.csv", balanced_csv());
    const TaskDataset a = ingest_csv(path.string());
    const TaskDataset b = ingest_csv(path.string());
    CHECK(a.train_idx == b.train_idx);
    CHECK(a.val_idx == b.val_idx);
    CHECK(a.labels == b.labels);
    REQUIRE(a.features.size() == b.features.size());
    for (std::size_t i = 0; i < a.features.size(); ++i)
        CHECK((a.features[i] - b.features[i]).cwiseAbs().maxCoeff() == 0.0);
    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv stratification keeps class proportions within one sample") {
    // 3 classes with uneven counts: 12 / 8 / 20 sequences.
    std::string body = "seq_id,t,label,x\n";
    int seq = 0;
    auto emit = [&](int label, int n) {
        for (int i = 0; i < n; ++i, ++seq)
            for (int t = 0; t < 2; ++t)
                body += "s" + std::to_string(seq) + "," + std::to_string(t) + "," +
                        std::to_string(label) + "," + std::to_string(0.01 * seq + t) + "\n";
    };
    emit(0, 12);
    emit(1, 8);
    emit(2, 20);
    const auto path = write_temp_csv("earl_strat.csv", body);
    const TaskDataset data = ingest_csv(path.string());

    std::map<int, int> val_counts, tot_counts;
    for (int i : data.val_idx) ++val_counts[data.labels[i]];
    for (int lab : data.labels) ++tot_counts[lab];
    const double val_frac = static_cast<double>(data.val_idx.size()) / 40.0;
    for (const auto& [lab, total] : tot_counts) {
        const double expected = val_frac * total;
        CHECK(std::abs(val_counts[lab] - expected) <= 1.0);
    }
    std::filesystem::remove(path);
}

TEST_CASE("ingest_csv rejects malformed inputs") {
    SUBCASE("missing column is named in the error") {
        const auto path = write_temp_csv("earl_missing.csv", "seq_id,t,x\n a,0,1\n");
        CHECK_THROWS_WITH_AS(ingest_csv(path.string()), doctest::Contains("label"), SchemaError);
        std::filesystem::remove(path);
    }
    SUBCASE("class with fewer than 2 sequences cannot stratify") {
        std::string body = "seq_id,t,label,x\n";
        for (int i = 0; i < 6; ++i)
            body += "s" + std::to_string(i) + ",0," + (i == 0 ? "1" : "0") + "," +
                    std::to_string(i) + "\n";
        const auto path = write_temp_csv("earl_thin_class.csv", body);
        CHECK_THROWS_AS(ingest_csv(path.string()), SchemaError);
        std::filesystem::remove(path);
    }
    SUBCASE("conflicting labels for one sequence id") {
        const auto path = write_temp_csv("earl_conflict.csv",
                                         "seq_id,t,label,x\na,0,0,1\na,1,1,2\nb,0,1,3\n");
        CHECK_THROWS_AS(ingest_csv(path.string()), SchemaError);
        std::filesystem::remove(path);
    }
}

TEST_CASE("ingest_csv maps string labels to sorted dense ids and numeric labels numerically") {
    std::string body = "seq_id,t,label,x\n";
    auto emit = [&](const std::string& id, const std::string& lab, double x) {
        body += id + ",0," + lab + "," + std::to_string(x) + "\n";
        body += id + ",1," + lab + "," + std::to_string(x + 1) + "\n";
    };
    SUBCASE("string labels") {
        emit("a", "hot", 0.0);
        emit("b", "cold", 1.0);
        emit("c", "hot", 2.0);
        emit("d", "cold", 3.0);
        const auto path = write_temp_csv("earl_str_labels.csv", body);
        const TaskDataset data = ingest_csv(path.string());
        CHECK(data.class_count == 2);
        CHECK(data.labels == std::vector<int>{1, 0, 1, 0});  // cold=0, hot=1 (sorted)
        std::filesystem::remove(path);
    }
    SUBCASE("numeric labels sort numerically, not lexically") {
        emit("a", "2", 0.0);
        emit("b", "10", 1.0);
        emit("c", "2", 2.0);
        emit("d", "10", 3.0);
        const auto path = write_temp_csv("earl_num_labels.csv", body);
        const TaskDataset data = ingest_csv(path.string());
        CHECK(data.labels == std::vector<int>{0, 1, 0, 1});  // 2 -> 0, 10 -> 1
        std::filesystem::remove(path);
    }
}

TEST_CASE("synth_task labels are balanced and tensors deterministic") {
    for (TaskKind kind :
         {TaskKind::freq_discrim, TaskKind::noisy_parity, TaskKind::amplitude_mod}) {
        CAPTURE(task_kind_name(kind));
        const TaskDataset a = synth_task(kind, 41, 20, 99);
        int ones = 0;
        for (int lab : a.labels) ones += lab;
        CHECK(std::abs(2 * ones - 41) <= 1);
        CHECK(a.class_count == 2);
        CHECK(a.features.size() == 41);
        CHECK(a.features[0].rows() == 20);
        CHECK(a.features[0].cols() == 1);

        const TaskDataset b = synth_task(kind, 41, 20, 99);
        for (std::size_t i = 0; i < a.features.size(); ++i)
            CHECK((a.features[i] - b.features[i]).cwiseAbs().maxCoeff() == 0.0);

        const TaskDataset c = synth_task(kind, 41, 20, 100);
        double diff = 0.0;
        for (std::size_t i = 0; i < a.features.size(); ++i)
            diff = std::max(diff, (a.features[i] - c.features[i]).cwiseAbs().maxCoeff());
        CHECK(diff > 0.0);
    }
}

TEST_CASE("synth_task rejects undersized requests") {
    CHECK_THROWS_AS(synth_task(TaskKind::freq_discrim, 19, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS(synth_task(TaskKind::freq_discrim, 20, 9, 1), std::invalid_argument);
    CHECK_NOTHROW(synth_task(TaskKind::freq_discrim, 20, 10, 1));
}

TEST_CASE("high-SNR freq_discrim is separable by a ridge readout on raw features") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 100, 50, 7, /*noise=*/0.01);
    CHECK(flat_ridge_accuracy(data, 1e-4) >= 0.95);
}

TEST_CASE("task kind names round-trip") {
    for (const char* name : {"freq_discrim", "noisy_parity", "amplitude_mod"})
        CHECK(task_kind_name(parse_task_kind(name)) == std::string(name));
    CHECK_THROWS_AS(parse_task_kind("walk"), ConfigError);
    for (const char* name : {"gru", "ridge"})
        CHECK(readout_kind_name(parse_readout_kind(name)) == std::string(name));
    CHECK_THROWS_AS(parse_readout_kind("mlp"), ConfigError);
}

TEST_CASE("reference energy is the analytic worst case") {
    SearchSpace space;
    space.size_range = {100, 1000};
    space.conn_range = {0.2, 0.7};

    SUBCASE("spike term only") {
        const EnergyModel energy{1.0, 0.0, 0.0, 1.0};
        CHECK(reference_energy_for(space, 50, 3, energy) == 50000.0);
    }
    SUBCASE("zero connectivity kills the synaptic term") {
        space.conn_range = {0.0, 0.0};
        const EnergyModel energy{0.0, 1.0, 0.0, 1.0};
        CHECK(reference_energy_for(space, 50, 3, energy) == 0.0);
    }
    SUBCASE("all terms") {
        const EnergyModel energy{2.0, 0.5, 0.25, 1.0};
        const double expected = (2.0 * 1000 + 0.5 * 1000 * 1000 * 0.7 + 0.25 * 1000) * 40;
        CHECK(reference_energy_for(space, 40, 1, energy) == expected);
    }
}

TEST_CASE("energy model validation") {
    const EnergyModel negative{-1.0, 0.1, 0.01, 1.0};
    CHECK_THROWS_AS(negative.validate(), ConfigError);
    const EnergyModel no_reference{1.0, 0.1, 0.01, 0.0};
    CHECK_THROWS_AS(no_reference.validate(), ConfigError);
    CHECK_NOTHROW(EnergyModel().validate());
}

TEST_CASE("zero-input dataset spends leak energy only") {
    // Power-of-two counts keep the arithmetic exact: 0.25 * (16*N*T) / 16 == 0.25*N*T.
    const TaskDataset data = zero_input_dataset(16, 8, 2);
    const Configuration config{128, 0.3, 0.9, 0.25};
    const EnergyModel energy{7.0, 3.0, 0.25, 1e6};
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::ridge;

    const EvalOutcome out = evaluate(config, data, eval_cfg, energy, 5);
    CHECK_FALSE(out.failed);
    CHECK(out.values.energy_pj_per_sample == 0.25 * 128 * 8);
    CHECK(out.values.energy_normalized == doctest::Approx(0.25 * 128 * 8 / 1e6));
}

TEST_CASE("energy decomposes linearly over the three counters") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 40, 20, 3);
    const Configuration config{150, 0.3, 0.9, 0.25};
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::ridge;

    auto energy_with = [&](double es, double ey, double el) {
        return evaluate(config, data, eval_cfg, EnergyModel{es, ey, el, 1e9}, 11)
            .values.energy_pj_per_sample;
    };
    const double spikes_per_s = energy_with(1.0, 0.0, 0.0);
    const double events_per_s = energy_with(0.0, 1.0, 0.0);
    const double steps_per_s = energy_with(0.0, 0.0, 1.0);

    // Counter rates are integer totals divided by S.
    CHECK(steps_per_s == 150.0 * 20.0);
    CHECK(spikes_per_s * 40 == doctest::Approx(std::round(spikes_per_s * 40)).epsilon(1e-9));
    CHECK(events_per_s * 40 == doctest::Approx(std::round(events_per_s * 40)).epsilon(1e-9));
    CHECK(spikes_per_s > 0.0);
    CHECK(events_per_s > 0.0);

    const double combined = energy_with(2.0, 0.5, 0.25);
    CHECK(combined ==
          doctest::Approx(2.0 * spikes_per_s + 0.5 * events_per_s + 0.25 * steps_per_s)
              .epsilon(1e-12));
}

TEST_CASE("evaluate is deterministic and in-range") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 40, 20, 3);
    SearchSpace space;
    const EnergyModel energy{1.0, 0.1, 0.01, reference_energy_for(space, 20, 1, EnergyModel{})};
    const Configuration config{200, 0.4, 0.95, 0.3};
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::ridge;

    const EvalOutcome a = evaluate(config, data, eval_cfg, energy, 17);
    const EvalOutcome b = evaluate(config, data, eval_cfg, energy, 17);
    CHECK(a.values.accuracy == b.values.accuracy);
    CHECK(a.values.energy_pj_per_sample == b.values.energy_pj_per_sample);
    CHECK(a.values.energy_normalized == b.values.energy_normalized);

    CHECK(a.values.accuracy >= 0.0);
    CHECK(a.values.accuracy <= 1.0);
    CHECK(a.values.energy_normalized >= 0.0);
    CHECK(a.values.energy_normalized <= 1.0);

    const EvalOutcome c = evaluate(config, data, eval_cfg, energy, 18);
    CHECK(c.values.energy_pj_per_sample != a.values.energy_pj_per_sample);
}

TEST_CASE("energy grows with reservoir size") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 30, 15, 9);
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::ridge;
    const EnergyModel energy{1.0, 0.1, 0.01, 1e9};

    auto mean_energy = [&](int size) {
        double total = 0.0;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const Configuration config{size, 0.4, 0.9, 0.3};
            total += evaluate(config, data, eval_cfg, energy, seed).values.energy_pj_per_sample;
        }
        return total / 5.0;
    };
    CHECK(mean_energy(200) > mean_energy(100));
}

TEST_CASE("diverging GRU training maps to the sentinel outcome") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 20, 10, 5);
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::gru;
    eval_cfg.train_spec.epochs = 5;
    eval_cfg.train_spec.batch_size = 4;
    eval_cfg.train_spec.learning_rate = 1e308;  // overflows parameters to inf on step one
    eval_cfg.train_spec.weight_decay = 0.0;
    const EnergyModel energy{1.0, 0.1, 0.01, 123.5};

    const EvalOutcome out = evaluate(Configuration{100, 0.3, 0.9, 0.3}, data, eval_cfg, energy, 2);
    CHECK(out.failed);
    CHECK(out.values.accuracy == 0.0);
    CHECK(out.values.energy_normalized == 1.0);
    CHECK(out.values.energy_pj_per_sample == 123.5);
    CHECK_FALSE(out.message.empty());
}

TEST_CASE("gru readout evaluates end to end on a small task") {
    const TaskDataset data = synth_task(TaskKind::freq_discrim, 20, 10, 5);
    EvalConfig eval_cfg;
    eval_cfg.readout = ReadoutKind::gru;
    eval_cfg.train_spec.epochs = 10;
    eval_cfg.train_spec.batch_size = 8;
    const EnergyModel energy{1.0, 0.1, 0.01, 1e9};

    const EvalOutcome out = evaluate(Configuration{100, 0.3, 0.9, 0.3}, data, eval_cfg, energy, 2);
    CHECK_FALSE(out.failed);
    CHECK(out.values.accuracy >= 0.0);
    CHECK(out.values.accuracy <= 1.0);
    CHECK(out.values.energy_pj_per_sample > 0.0);
}
