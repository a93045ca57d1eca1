#include "qsl/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "qsl/amplitudes.hpp"
#include "qsl/errors.hpp"
#include "qsl/oracle.hpp"

namespace qsl {

namespace {

std::string describe(double value)
{
    return format_double(value);
}

void check_point(const QslRecord& r, NormKind selected, double rho_defect, std::vector<std::string>& violations)
{
    const std::string at = "t=" + describe(r.t) + ": ";
    if (r.t_lb > r.t + kBoundSlack)
        violations.push_back(at + "t_LB=" + describe(r.t_lb) + " exceeds t");
    const double slack = 1e-12 * std::max(1.0, r.delta_tr);
    if (r.delta_op > r.delta_hs + slack || r.delta_hs > r.delta_tr + slack)
        violations.push_back(at + "norm chain Delta_op <= Delta_hs <= Delta_tr broken");
    if (std::abs(std::abs(std::cos(r.B) - 1.0) - std::abs(r.F - 1.0)) > kNumeratorIdentityTolerance)
        violations.push_back(at + "|cos B - 1| differs from |F - 1|");
    if (r.t > 0.0 && selected != NormKind::Op)
        violations.push_back(at + "reciprocal-norm maximum not attained by Delta_op");
    if (rho_defect > kRhoHermitianTolerance)
        violations.push_back(at + "rho_S not Hermitian (defect " + describe(rho_defect) + ")");
}

} // namespace

OutputFormat parse_output_format(const std::string& text)
{
    if (text == "csv")
        return OutputFormat::Csv;
    if (text == "json")
        return OutputFormat::Json;
    throw Error(ErrorKind::InvalidConfig, "unknown output format '" + text + "'");
}

std::string to_string(OutputFormat format)
{
    return format == OutputFormat::Csv ? "csv" : "json";
}

void RunConfig::validate() const
{
    params.validate();
    if (params.j != spin_half)
        throw Error(ErrorKind::InvalidConfig, "the speed-limit analysis needs j = 1/2");
    if (!(t_max > 0.0) || !std::isfinite(t_max))
        throw Error(ErrorKind::InvalidConfig, "t_max must be positive");
    if (steps < 2)
        throw Error(ErrorKind::InvalidConfig, "steps must be at least 2");
}

void SweepSpec::validate() const
{
    if (eta_list.empty() || n_max_list.empty())
        throw Error(ErrorKind::InvalidConfig, "sweep lists must be non-empty");
    RunConfig probe;
    probe.params = base;
    probe.t_max = t_max;
    probe.steps = steps;
    for (double eta : eta_list) {
        for (int n : n_max_list) {
            probe.params.eta = eta;
            probe.params.n_max = n;
            probe.validate();
        }
    }
}

std::vector<double> time_grid(double t_max, int steps)
{
    std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i)
        grid[i] = t_max * i / steps;
    return grid;
}

RunResult run_single(const RunConfig& config)
{
    config.validate();
    const ModelParams& p = config.params;
    const std::vector<double> grid = time_grid(config.t_max, config.steps);

    std::vector<Deltas> averaged;
    try {
        averaged = cumulative_deltas(grid, p, config.mode, config.derivative);
    } catch (const Error& e) {
        throw Error(e.kind(), std::string("averaged energies: ") + e.what());
    }

    RunResult out;
    out.records.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double t = grid[i];
        try {
            const EnvFactor env = env_factor(p.j, p.j, t, p, config.mode);
            QslRecord r;
            r.t = t;
            r.F = fidelity_from_env(env.value.real(), t, p);
            r.B = bures_angle(r.F);
            r.delta_op = averaged[i].op;
            r.delta_tr = averaged[i].tr;
            r.delta_hs = averaged[i].hs;
            NormKind selected = NormKind::Op;
            if (t > 0.0) {
                const LowerBound lb = lower_bound(r.F, averaged[i]);
                r.t_lb = lb.value;
                selected = lb.selected;
            }
            const double defect = hermiticity_defect(rho_from_env(t, p, env.value));
            check_point(r, selected, defect, out.violations);
            out.records.push_back(r);
        } catch (const Error& e) {
            throw Error(e.kind(), "at t=" + describe(t) + ": " + e.what());
        }
    }
    return out;
}

bool SweepResult::ok() const
{
    return std::all_of(entries.begin(), entries.end(),
                       [](const SweepEntry& e) { return !e.error && e.result.violations.empty(); });
}

const SweepEntry* SweepResult::find(double eta, int n_max) const
{
    for (const auto& e : entries)
        if (e.eta == eta && e.n_max == n_max)
            return &e;
    return nullptr;
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads)
{
    spec.validate();
    SweepResult out;
    for (double eta : spec.eta_list)
        for (int n : spec.n_max_list)
            out.entries.push_back({eta, n, {}, std::nullopt});

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < out.entries.size(); k = next++) {
            SweepEntry& entry = out.entries[k];
            RunConfig config;
            config.params = spec.base;
            config.params.eta = entry.eta;
            config.params.n_max = entry.n_max;
            config.t_max = spec.t_max;
            config.steps = spec.steps;
            config.mode = spec.mode;
            config.derivative = spec.derivative;
            try {
                entry.result = run_single(config);
            } catch (const std::exception& e) {
                entry.error = e.what();
            }
        }
    };

    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(out.entries.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned k = 1; k < threads; ++k)
            pool.emplace_back(worker);
        worker();
    }

    for (double eta : spec.eta_list) {
        const SweepEntry* five = out.find(eta, 5);
        const SweepEntry* ten = out.find(eta, 10);
        if (five && ten && !five->error && !ten->error)
            out.saturation.push_back(compare_curves(eta, five->result.records, ten->result.records));
    }
    return out;
}

SaturationRow compare_curves(double eta, std::span<const QslRecord> lower, std::span<const QslRecord> upper)
{
    if (lower.size() != upper.size())
        throw Error(ErrorKind::InvalidConfig, "saturation curves use different grids");
    SaturationRow row;
    row.eta = eta;
    for (std::size_t i = 0; i < lower.size(); ++i) {
        row.sup_difference = std::max(row.sup_difference, std::abs(lower[i].t_lb - upper[i].t_lb));
        row.peak_t_lb = std::max({row.peak_t_lb, lower[i].t_lb, upper[i].t_lb});
    }
    row.ratio = row.peak_t_lb > 0.0 ? row.sup_difference / row.peak_t_lb : 0.0;
    row.indistinguishable = row.sup_difference <= kSaturationThreshold * row.peak_t_lb;
    return row;
}

int mean_crossings(std::span<const double> values)
{
    if (values.empty())
        return 0;
    double mean = 0.0;
    for (double v : values)
        mean += v;
    mean /= static_cast<double>(values.size());

    int count = 0;
    int previous = 0;
    for (double v : values) {
        const int side = v > mean ? 1 : (v < mean ? -1 : 0);
        if (side != 0) {
            if (previous != 0 && side != previous)
                ++count;
            previous = side;
        }
    }
    return count;
}

std::string format_double(double value)
{
    char buffer[64];
    const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value, std::chars_format::general, 17);
    return std::string(buffer, result.ptr);
}

void write_csv(std::span<const QslRecord> records, std::ostream& out)
{
    out << kCsvHeader << '\n';
    for (const QslRecord& r : records) {
        const double ratio = r.t > 0.0 ? r.t_lb / r.t : 0.0;
        out << format_double(r.t) << ',' << format_double(r.F) << ',' << format_double(r.B) << ','
            << format_double(r.delta_op) << ',' << format_double(r.delta_tr) << ',' << format_double(r.delta_hs)
            << ',' << format_double(r.t_lb) << ',' << format_double(ratio) << '\n';
    }
}

std::string to_csv(std::span<const QslRecord> records)
{
    std::ostringstream out;
    write_csv(records, out);
    return out.str();
}

nlohmann::json config_to_json(const RunConfig& config)
{
    const ModelParams& p = config.params;
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& o : config.outputs)
        outputs.push_back({{"format", to_string(o.format)}, {"path", o.path}});
    return {
        {"omega", p.omega},
        {"beta", p.beta},
        {"eta", p.eta},
        {"j", p.j.value()},
        {"n_max", p.n_max},
        {"fock_dim", p.fock_dim},
        {"t_max", config.t_max},
        {"steps", config.steps},
        {"mode", to_string(config.mode)},
        {"derivative", to_string(config.derivative)},
        {"outputs", outputs},
    };
}

RunConfig config_from_json(const nlohmann::json& doc)
{
    const nlohmann::json& c = doc.contains("config") ? doc.at("config") : doc;
    RunConfig config;
    config.params.omega = c.at("omega").get<double>();
    config.params.beta = c.at("beta").get<double>();
    config.params.eta = c.at("eta").get<double>();
    config.params.j = Spin::from_value(c.at("j").get<double>());
    config.params.n_max = c.at("n_max").get<int>();
    config.params.fock_dim = c.at("fock_dim").get<int>();
    config.t_max = c.at("t_max").get<double>();
    config.steps = c.at("steps").get<int>();
    config.mode = parse_normalization_mode(c.at("mode").get<std::string>());
    config.derivative = parse_derivative_method(c.at("derivative").get<std::string>());
    for (const auto& o : c.at("outputs"))
        config.outputs.push_back({parse_output_format(o.at("format").get<std::string>()), o.at("path").get<std::string>()});
    return config;
}

nlohmann::json to_json(std::span<const QslRecord> records, const RunConfig& config)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const QslRecord& r : records) {
        rows.push_back({
            {"t", r.t},
            {"F", r.F},
            {"B", r.B},
            {"delta_op", r.delta_op},
            {"delta_tr", r.delta_tr},
            {"delta_hs", r.delta_hs},
            {"t_lb", r.t_lb},
            {"t_lb_over_t", r.t > 0.0 ? r.t_lb / r.t : 0.0},
        });
    }
    return {{"config", config_to_json(config)}, {"records", rows}};
}

std::vector<QslRecord> records_from_json(const nlohmann::json& doc)
{
    std::vector<QslRecord> out;
    for (const auto& row : doc.at("records")) {
        QslRecord r;
        r.t = row.at("t").get<double>();
        r.F = row.at("F").get<double>();
        r.B = row.at("B").get<double>();
        r.delta_op = row.at("delta_op").get<double>();
        r.delta_tr = row.at("delta_tr").get<double>();
        r.delta_hs = row.at("delta_hs").get<double>();
        r.t_lb = row.at("t_lb").get<double>();
        out.push_back(r);
    }
    return out;
}

void emit(std::span<const QslRecord> records, OutputFormat format, const std::string& path, const RunConfig& config)
{
    if (records.empty())
        throw Error(ErrorKind::InvalidConfig, "nothing to emit");
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
    if (format == OutputFormat::Csv)
        write_csv(records, file);
    else
        file << to_json(records, config).dump(2) << '\n';
    file.flush();
    if (!file)
        throw Error(ErrorKind::Io, "write to '" + path + "' failed");
}

OracleCheck oracle_check(const ModelParams& params, NormalizationMode mode, double t_max, int points)
{
    OracleCheck check;
    check.points = points;
    check.max_deviation = oracle_deviation(params, mode, t_max, points);
    check.passed = check.max_deviation <= kOracleTolerance;
    return check;
}

} // namespace qsl
