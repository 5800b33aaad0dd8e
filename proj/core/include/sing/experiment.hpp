#pragma once

#include <map>
#include <string>
#include <vector>

#include "sing/datasets.hpp"
#include "sing/driver.hpp"

namespace sing {

// A whole repeated-trial experiment, parseable from a single JSON file.
struct ExperimentConfig {
    std::string family;
    std::map<std::string, double> parameters;
    SingConfig sing;
    int trials = 1;
    std::vector<std::size_t> n_values;
    std::string output_dir = ".";
};

ExperimentConfig experiment_from_json(const std::string& text);

struct GeneratedData {
    SampleMatrix samples;
    UndirectedGraph truth;
    DatasetSpec spec;
};

// Draws one dataset of the named family. The sample stream is rng; structural
// randomness (the nonparanormal graph) comes from a stream derived from the
// seed alone, so independent trial batches share one ground-truth graph.
GeneratedData generate_dataset(const std::string& family,
                               const std::map<std::string, double>& parameters, std::size_t n,
                               RngStream rng);

struct TrialRecord {
    std::size_t n = 0;
    int trial = 0;
    int type1 = 0;
    int type2 = 0;
    double seconds = 0.0;
    bool failed = false;
};

struct TrialSummaryRow {
    std::size_t n = 0;
    double mean_type1 = 0.0, ci_type1 = 0.0;
    double mean_type2 = 0.0, ci_type2 = 0.0;
    int failures = 0;
};

struct TrialSummary {
    std::vector<TrialRecord> records;
    std::vector<TrialSummaryRow> rows;
};

// Runs trials x n_values seeded repetitions (stream = trial index) and
// aggregates mean and 95% confidence half-width per error type. Per-trial
// failures are counted and skipped in the aggregation.
TrialSummary run_trials(const ExperimentConfig& cfg);

// Aggregated CSV: n, mean_type1, ci_type1, mean_type2, ci_type2.
void write_trial_summary_csv(const std::string& path, const TrialSummary& summary);
// Per-trial CSV: n, trial, type1, type2, seconds, failed.
void write_trial_records_csv(const std::string& path, const TrialSummary& summary);

}  // namespace sing
