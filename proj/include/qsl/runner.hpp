#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "qsl/metrics.hpp"
#include "qsl/model.hpp"

namespace qsl {

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(const std::string& text);
std::string to_string(OutputFormat format);

struct OutputSpec {
    OutputFormat format = OutputFormat::Csv;
    std::string path;
};

struct RunConfig {
    ModelParams params;
    double t_max = 20.0;
    int steps = 400;
    NormalizationMode mode = NormalizationMode::InitialUnit;
    DerivativeMethod derivative = DerivativeMethod::Analytic;
    std::vector<OutputSpec> outputs;

    /// Throws InvalidConfig.
    void validate() const;
};

/// Records plus every per-point invariant that failed (empty when all hold).
struct RunResult {
    std::vector<QslRecord> records;
    std::vector<std::string> violations;
};

/// Tolerances of the per-point checks.
inline constexpr double kBoundSlack = 1e-9;
inline constexpr double kNumeratorIdentityTolerance = 1e-12;
inline constexpr double kRhoHermitianTolerance = 1e-12;

/// Grid t_i = i t_max / steps for i = 0..steps.
std::vector<double> time_grid(double t_max, int steps);

/// Evaluates the grid and checks t_LB <= t, Delta_op <= Delta_hs <= Delta_tr,
/// |cos B - 1| = |F - 1|, the op-norm selection and Hermiticity of rho_S.
/// Numerical failures are rethrown as Error with the offending t in the message.
RunResult run_single(const RunConfig& config);

struct SweepSpec {
    ModelParams base;
    std::vector<double> eta_list{0.1, 1.0, 5.0};
    std::vector<int> n_max_list{0, 5, 10};
    double t_max = 20.0;
    int steps = 400;
    NormalizationMode mode = NormalizationMode::InitialUnit;
    DerivativeMethod derivative = DerivativeMethod::Analytic;

    void validate() const;
};

struct SweepEntry {
    double eta = 0.0;
    int n_max = 0;
    RunResult result;
    std::optional<std::string> error;
};

/// n_max = 5 against n_max = 10 for one coupling.
struct SaturationRow {
    double eta = 0.0;
    double sup_difference = 0.0;
    double peak_t_lb = 0.0;
    double ratio = 0.0;
    bool indistinguishable = false;
};

inline constexpr double kSaturationThreshold = 0.02;

struct SweepResult {
    std::vector<SweepEntry> entries;
    std::vector<SaturationRow> saturation;

    [[nodiscard]] bool ok() const;
    [[nodiscard]] const SweepEntry* find(double eta, int n_max) const;
};

/// Entries come back in (eta, n_max) list order whatever the thread count.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 0);

/// Sup-distance of two t_LB curves on a shared grid, relative to the larger peak.
SaturationRow compare_curves(double eta, std::span<const QslRecord> lower, std::span<const QslRecord> upper);

/// Crossings of the series through its own mean (an oscillation count).
int mean_crossings(std::span<const double> values);

// Output ------------------------------------------------------------------

inline constexpr const char* kCsvHeader = "t,F,B,delta_op,delta_tr,delta_hs,t_lb,t_lb_over_t";

/// printf("%.17g")-style text, independent of the C locale.
std::string format_double(double value);

void write_csv(std::span<const QslRecord> records, std::ostream& out);
std::string to_csv(std::span<const QslRecord> records);

nlohmann::json config_to_json(const RunConfig& config);
nlohmann::json to_json(std::span<const QslRecord> records, const RunConfig& config);
std::vector<QslRecord> records_from_json(const nlohmann::json& doc);
RunConfig config_from_json(const nlohmann::json& doc);

/// Writes records in the requested format. Throws IoError.
void emit(std::span<const QslRecord> records, OutputFormat format, const std::string& path, const RunConfig& config);

/// Brute-force check of the closed-form rho_S on a coarse grid.
struct OracleCheck {
    double max_deviation = 0.0;
    int points = 0;
    bool passed = false;
};

inline constexpr double kOracleTolerance = 1e-6;

OracleCheck oracle_check(const ModelParams& params, NormalizationMode mode, double t_max, int points = 25);

} // namespace qsl
