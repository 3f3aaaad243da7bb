#include "earl/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <map>
#include <numbers>

#include "earl/csv.hpp"
#include "earl/rng.hpp"

namespace earl {
namespace {

constexpr std::uint64_t kSplitSeed = 0x5f5e100d1ce5ULL;

// Stratified 80/20 split plus z-scoring with training statistics, shared by
// ingestion and the synthetic generators.
void finalize_dataset(TaskDataset& data) {
    const int s = static_cast<int>(data.features.size());
    std::vector<std::vector<int>> by_class(data.class_count);
    for (int i = 0; i < s; ++i) by_class[data.labels[i]].push_back(i);

    Rng rng(kSplitSeed);
    for (int c = 0; c < data.class_count; ++c) {
        auto& idx = by_class[c];
        if (idx.size() < 2)
            throw SchemaError("class " + std::to_string(c) +
                              " has fewer than 2 sequences; cannot stratify");
        for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i)
            std::swap(idx[i], idx[rng.uniform_int(static_cast<std::uint64_t>(i + 1))]);
        const int n_c = static_cast<int>(idx.size());
        int v = static_cast<int>(std::lround(0.2 * n_c));
        v = std::clamp(v, 1, n_c - 1);
        for (int i = 0; i < n_c; ++i)
            (i < v ? data.val_idx : data.train_idx).push_back(idx[i]);
    }
    std::sort(data.train_idx.begin(), data.train_idx.end());
    std::sort(data.val_idx.begin(), data.val_idx.end());

    const int d = data.n_features();
    Vec mean = Vec::Zero(d), sq = Vec::Zero(d);
    long count = 0;
    for (int i : data.train_idx) {
        mean += data.features[i].colwise().sum().transpose();
        sq += data.features[i].array().square().colwise().sum().matrix().transpose();
        count += data.features[i].rows();
    }
    mean /= static_cast<double>(count);
    Vec std_dev(d);
    for (int j = 0; j < d; ++j) {
        const double var = sq[j] / count - mean[j] * mean[j];
        std_dev[j] = var > 1e-24 ? std::sqrt(var) : 0.0;
        if (std_dev[j] < 1e-12) {
            std::cerr << "warning: feature " << j
                      << " is constant on the training split; scaling to zero\n";
            std_dev[j] = 1.0;
        }
    }
    for (Mat& seq : data.features)
        seq = ((seq.rowwise() - mean.transpose()).array().rowwise() /
               std_dev.transpose().array())
                  .matrix();
    data.feature_mean = mean;
    data.feature_std = std_dev;
}

}  // namespace

int TaskDataset::max_timesteps() const {
    Eigen::Index best = 0;
    for (const Mat& seq : features) best = std::max(best, seq.rows());
    return static_cast<int>(best);
}

TaskDataset ingest_csv(const std::string& path, const CsvSchema& schema) {
    const csv::Table table = csv::read_file(path);

    auto need = [&](const std::string& name) {
        const int col = table.column(name);
        if (col < 0) throw SchemaError("missing column: " + name);
        return col;
    };
    const int label_col = need(schema.label_column);
    const int seq_col = need(schema.sequence_id_column);
    const int time_col = need(schema.time_column);

    std::vector<int> feat_cols;
    if (schema.feature_columns.empty()) {
        for (int j = 0; j < static_cast<int>(table.header.size()); ++j)
            if (j != label_col && j != seq_col && j != time_col) feat_cols.push_back(j);
    } else {
        for (const std::string& name : schema.feature_columns) feat_cols.push_back(need(name));
    }
    if (feat_cols.empty()) throw SchemaError("no feature columns");

    struct Row {
        double time;
        Vec values;
    };
    std::map<std::string, std::vector<Row>> sequences;  // ordered by id for determinism
    std::map<std::string, std::string> seq_label;
    for (const auto& row : table.rows) {
        if (row.size() != table.header.size())
            throw SchemaError("row has " + std::to_string(row.size()) + " fields, expected " +
                              std::to_string(table.header.size()));
        Row r;
        r.time = std::stod(row[time_col]);
        r.values.resize(static_cast<Eigen::Index>(feat_cols.size()));
        for (std::size_t j = 0; j < feat_cols.size(); ++j)
            r.values[static_cast<Eigen::Index>(j)] = std::stod(row[feat_cols[j]]);
        const std::string& id = row[seq_col];
        auto [it, inserted] = seq_label.try_emplace(id, row[label_col]);
        if (!inserted && it->second != row[label_col])
            throw SchemaError("sequence " + id + " has conflicting labels");
        sequences[id].push_back(std::move(r));
    }
    if (sequences.empty()) throw SchemaError("no data rows in " + path);

    // Map labels to dense class ids; numeric labels sort numerically.
    std::vector<std::string> label_names;
    for (const auto& [id, lab] : seq_label) label_names.push_back(lab);
    std::sort(label_names.begin(), label_names.end());
    label_names.erase(std::unique(label_names.begin(), label_names.end()), label_names.end());
    const bool numeric = std::all_of(label_names.begin(), label_names.end(), [](const auto& s) {
        char* end = nullptr;
        std::strtol(s.c_str(), &end, 10);
        return end && *end == '\0' && !s.empty();
    });
    if (numeric)
        std::sort(label_names.begin(), label_names.end(), [](const auto& a, const auto& b) {
            return std::stol(a) < std::stol(b);
        });
    std::map<std::string, int> label_ids;
    for (std::size_t i = 0; i < label_names.size(); ++i)
        label_ids[label_names[i]] = static_cast<int>(i);

    TaskDataset data;
    data.class_count = static_cast<int>(label_names.size());
    for (auto& [id, rows] : sequences) {
        std::stable_sort(rows.begin(), rows.end(),
                         [](const Row& a, const Row& b) { return a.time < b.time; });
        Mat seq(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(feat_cols.size()));
        for (std::size_t t = 0; t < rows.size(); ++t)
            seq.row(static_cast<Eigen::Index>(t)) = rows[t].values.transpose();
        data.features.push_back(std::move(seq));
        data.labels.push_back(label_ids.at(seq_label.at(id)));
    }
    finalize_dataset(data);
    return data;
}

TaskKind parse_task_kind(const std::string& s) {
    if (s == "freq_discrim") return TaskKind::freq_discrim;
    if (s == "noisy_parity") return TaskKind::noisy_parity;
    if (s == "amplitude_mod") return TaskKind::amplitude_mod;
    throw ConfigError("unknown task kind: " + s);
}

const char* task_kind_name(TaskKind k) {
    switch (k) {
        case TaskKind::freq_discrim: return "freq_discrim";
        case TaskKind::noisy_parity: return "noisy_parity";
        case TaskKind::amplitude_mod: return "amplitude_mod";
    }
    return "?";
}

TaskDataset synth_task(TaskKind kind, int s, int t, std::uint64_t seed, double noise_sigma) {
    if (s < 20) throw std::invalid_argument("synth_task: need at least 20 sequences");
    if (t < 10) throw std::invalid_argument("synth_task: need at least 10 timesteps");

    Rng rng(derive_seed(seed, 0x73796e7468ULL, static_cast<std::uint64_t>(kind)));
    constexpr double two_pi = 2.0 * std::numbers::pi;

    TaskDataset data;
    data.class_count = 2;
    data.features.reserve(s);
    data.labels.reserve(s);

    for (int i = 0; i < s; ++i) {
        const int label = i % 2;  // balanced by construction
        Mat seq(t, 1);
        switch (kind) {
            case TaskKind::freq_discrim: {
                const double cycles = label == 0 ? 2.0 : 5.0;
                const double phase = rng.uniform(-0.25, 0.25);
                for (int k = 0; k < t; ++k)
                    seq(k, 0) = std::sin(two_pi * cycles * k / t + phase) +
                                noise_sigma * rng.normal();
                break;
            }
            case TaskKind::noisy_parity: {
                // Four plateau-coded bits; the last is chosen so the pattern's
                // parity equals the label.
                int bits[4];
                int acc = 0;
                for (int b = 0; b < 3; ++b) {
                    bits[b] = static_cast<int>(rng.uniform_int(2));
                    acc ^= bits[b];
                }
                bits[3] = acc ^ label;
                for (int k = 0; k < t; ++k) {
                    const int b = std::min(3, 4 * k / t);
                    seq(k, 0) = (bits[b] ? 1.0 : -1.0) + noise_sigma * rng.normal();
                }
                break;
            }
            case TaskKind::amplitude_mod: {
                const double phase = rng.uniform(-0.25, 0.25);
                for (int k = 0; k < t; ++k) {
                    const double frac = static_cast<double>(k) / (t - 1);
                    const double env = label == 0 ? frac : 1.0 - frac;
                    seq(k, 0) = env * std::sin(two_pi * 3.0 * k / t + phase) +
                                noise_sigma * rng.normal();
                }
                break;
            }
        }
        data.features.push_back(std::move(seq));
        data.labels.push_back(label);
    }
    finalize_dataset(data);
    return data;
}

}  // namespace earl
