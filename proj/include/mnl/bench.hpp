// bench.hpp
//
// Experiment harness: instance families and their text format, seeded
// replications of the drivers, the per-replication CSV and its summary.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mnl/model.hpp"
#include "mnl/sar.hpp"

namespace mnl::bench {

// Raised for invalid user input; the CLI maps it to exit code 1.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct InstanceFile {
    Instance inst;
    std::map<std::string, std::string> meta;
};

// Line-oriented text, one `key: value` per line:
//   n: 6
//   k: 3
//   r: <n numbers, %.17g>
//   v: <n numbers, %.17g>
//   meta: family=uniform seed=7
void write_instance(std::ostream& os, const InstanceFile& file);
InstanceFile read_instance(std::istream& is);
void save_instance(const std::string& path, const InstanceFile& file);
InstanceFile load_instance(const std::string& path);

struct GenParams {
    std::string family;  // uniform | dense | sparse | lower-bound
    int n{0};
    int k{0};
    std::uint64_t seed{0};
    std::vector<double> gaps;           // lower-bound: one per item K+1..N, or one to repeat
    std::optional<double> min_gap;      // random families: require min_i gap_i >= this
    std::optional<double> max_min_gap;  // random families: require min_i gap_i < this
};

// Minimum margin between the two best assortments for random families.
inline constexpr double kUniquenessMargin = 1e-6;

InstanceFile generate(const GenParams& params);

enum class Mode { pac, pac_eps, regret, oracle };
enum class EstimatorKind { naive, reduced, adaptive, reg };

Mode parse_mode(const std::string& s);
std::string to_string(Mode m);
EstimatorKind parse_estimator(const std::string& s);
std::string to_string(EstimatorKind e);

struct ExperimentConfig {
    Mode mode{Mode::pac};
    InstanceFile instance;
    std::string instance_source;  // path or generator description, echoed in metadata
    double delta{0.1};
    double eps{0.1};
    std::int64_t horizon{100000};
    int reps{1};
    std::uint64_t seed{0};
    EstimatorKind estimator{EstimatorKind::adaptive};
    int threads{0};  // 0: MNL_THREADS or hardware concurrency
};

struct ResultRow {
    int rep{0};
    std::uint64_t seed{0};  // stream seed of the replication
    std::string family;
    std::string mode;
    std::string estimator;
    std::int64_t steps{0};
    std::int64_t rough_steps{0};
    bool success{false};
    int returned_size{0};
    std::string returned_set;  // 1-based items joined by ';'
    double revenue_gap{0.0};   // theta* - R(returned)
    double regret{0.0};
    int phases{0};
    std::string status;  // ok | aborted | horizon
};

inline constexpr const char* kCsvVersion = "mnl-results-v1";
inline constexpr const char* kToolVersion = "1.0.0";
std::string csv_header();
std::string csv_row(const ResultRow& row);
ResultRow parse_csv_row(const std::string& line, std::size_t line_number);

struct ExperimentOutput {
    std::vector<ResultRow> rows;
    std::vector<double> regret_curve;  // regret mode, replication 0
};

// One replication of the configured driver on a stream forked from the seed.
ResultRow run_replication(const ExperimentConfig& config, int rep,
                          std::vector<double>* regret_curve = nullptr);

// All replications; rows come back in replication order regardless of scheduling.
ExperimentOutput run_experiment(const ExperimentConfig& config);

int worker_count(int requested);

void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& is);
std::string metadata_json(const ExperimentConfig& config, const std::string& timestamp);

// Oracle report: S*, theta*, per-item gaps.
void print_oracle(std::ostream& os, const Instance& inst);

struct SummaryRow {
    std::string family, mode, estimator;
    std::size_t count{0};
    double success_rate{0.0};
    double mean_steps{0.0};
    double median_steps{0.0};
    double p10_steps{0.0};
    double p90_steps{0.0};
    double mean_regret{0.0};
    double median_regret{0.0};
    double median_phases{0.0};
    int ordering{0};  // rank of median steps among estimators of the same family and mode
};

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
void write_summary(std::ostream& os, const std::vector<SummaryRow>& summary);

double median(std::vector<double> values);
double quantile(std::vector<double> values, double q);

}  // namespace mnl::bench
