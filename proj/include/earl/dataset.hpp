#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "earl/types.hpp"

namespace earl {

// Sequence-classification data: S sequences of shape T_i x D with integer
// labels. Features are z-scored with training-split statistics; the split
// is stratified 80/20 with a fixed shuffle seed, so re-ingesting the same
// data reproduces it exactly.
struct TaskDataset {
    std::vector<Mat> features;  // per sequence, T_i x D
    std::vector<int> labels;
    int class_count = 0;
    Vec feature_mean;           // normalization applied to every sequence
    Vec feature_std;
    std::vector<int> train_idx;
    std::vector<int> val_idx;

    int n_features() const { return features.empty() ? 0 : static_cast<int>(features[0].cols()); }
    int max_timesteps() const;
};

struct CsvSchema {
    std::vector<std::string> feature_columns;  // empty: every remaining column
    std::string label_column = "label";
    std::string sequence_id_column = "seq_id";
    std::string time_column = "t";
};

TaskDataset ingest_csv(const std::string& path, const CsvSchema& schema = {});

enum class TaskKind { freq_discrim, noisy_parity, amplitude_mod };

TaskKind parse_task_kind(const std::string& s);
const char* task_kind_name(TaskKind k);

// Balanced two-class synthetic sequence tasks. freq_discrim separates two
// sine frequencies under phase jitter and noise; noisy_parity labels by the
// parity of a planted bit pattern rendered as signal plateaus; amplitude_mod
// separates rising from falling envelopes.
TaskDataset synth_task(TaskKind kind, int s, int t, std::uint64_t seed,
                       double noise_sigma = 0.1);

}  // namespace earl
