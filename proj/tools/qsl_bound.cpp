// Command-line driver: single runs, sweeps and the inline oracle check.

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "qsl/errors.hpp"
#include "qsl/runner.hpp"

namespace {

enum Exit { kOk = 0, kInvalidConfig = 1, kNumerical = 2, kOracleMismatch = 3 };

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag)
{
    std::vector<T> out;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::stringstream cell(item);
        T value{};
        cell >> value;
        if (cell.fail() || !(cell >> std::ws).eof())
            throw qsl::Error(qsl::ErrorKind::InvalidConfig, std::string("bad value '") + item + "' for " + flag);
        out.push_back(value);
    }
    if (out.empty())
        throw qsl::Error(qsl::ErrorKind::InvalidConfig, std::string("empty list for ") + flag);
    return out;
}

// Shortest round-trip text keeps file names readable (0.1, not 0.10000000000000001).
std::string key_name(double eta, int n_max)
{
    char buffer[32];
    const auto r = std::to_chars(buffer, buffer + sizeof(buffer), eta);
    return "eta_" + std::string(buffer, r.ptr) + "_nmax_" + std::to_string(n_max);
}

int run_oracle(const qsl::ModelParams& params, qsl::NormalizationMode mode, double t_max)
{
    const qsl::OracleCheck check = qsl::oracle_check(params, mode, t_max);
    std::cerr << "oracle check eta=" << qsl::format_double(params.eta) << " n_max=" << params.n_max
              << ": max deviation " << qsl::format_double(check.max_deviation) << " over " << check.points
              << " points -> " << (check.passed ? "ok" : "MISMATCH") << '\n';
    return check.passed ? kOk : kOracleMismatch;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum speed-limit lower bound for a spin coupled to a single boson mode"};

    double omega = 1.0;
    double beta = 1.0;
    std::string eta_text = "0.1";
    double j = 0.5;
    std::string nmax_text = "0";
    int fock_dim = 0;
    double t_max = 20.0;
    int steps = 400;
    std::string mode_text = "initial-unit";
    std::string derivative_text = "analytic";
    bool sweep = false;
    bool oracle = false;
    std::string format_text = "csv";
    std::string out;
    unsigned threads = 0;

    app.add_option("--omega", omega, "spin frequency");
    app.add_option("--beta", beta, "boson frequency");
    app.add_option("--eta", eta_text, "coupling (comma list with --sweep; default 0.1,1,5 there)");
    app.add_option("--j", j, "spin quantum number");
    app.add_option("--nmax", nmax_text, "highest initial boson level (comma list with --sweep; default 0,5,10 there)");
    app.add_option("--fock-dim", fock_dim, "oracle Fock truncation (0 = automatic)");
    app.add_option("--t-max", t_max, "end of the time grid");
    app.add_option("--steps", steps, "number of grid intervals");
    app.add_option("--mode", mode_text, "initial-unit | total-trace");
    app.add_option("--derivative", derivative_text, "analytic | finite-diff");
    app.add_flag("--sweep", sweep, "run the (eta, n_max) grid");
    app.add_flag("--oracle-check", oracle, "compare against brute-force propagation on 25 points");
    app.add_option("--format", format_text, "csv | json");
    app.add_option("--out", out, "output file (single run) or directory (sweep); stdout when empty");
    app.add_option("--threads", threads, "sweep worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalidConfig;
    }

    const bool eta_given = app.count("--eta") > 0;
    const bool nmax_given = app.count("--nmax") > 0;

    qsl::RunConfig config;
    qsl::OutputFormat format{};
    std::vector<double> etas;
    std::vector<int> nmaxes;
    try {
        config.params.omega = omega;
        config.params.beta = beta;
        config.params.j = qsl::Spin::from_value(j);
        config.params.fock_dim = fock_dim;
        config.t_max = t_max;
        config.steps = steps;
        config.mode = qsl::parse_normalization_mode(mode_text);
        config.derivative = qsl::parse_derivative_method(derivative_text);
        format = qsl::parse_output_format(format_text);
        etas = sweep && !eta_given ? std::vector<double>{0.1, 1.0, 5.0} : parse_list<double>(eta_text, "--eta");
        nmaxes = sweep && !nmax_given ? std::vector<int>{0, 5, 10} : parse_list<int>(nmax_text, "--nmax");
        if (!sweep && (etas.size() != 1 || nmaxes.size() != 1))
            throw qsl::Error(qsl::ErrorKind::InvalidConfig, "lists for --eta/--nmax need --sweep");
        config.params.eta = etas.front();
        config.params.n_max = nmaxes.front();
        if (!out.empty())
            config.outputs.push_back({format, out});
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << "invalid configuration: " << e.what() << '\n';
        return kInvalidConfig;
    }

    try {
        if (!sweep) {
            if (oracle) {
                if (const int code = run_oracle(config.params, config.mode, config.t_max); code != kOk)
                    return code;
            }
            const qsl::RunResult result = qsl::run_single(config);
            if (out.empty()) {
                if (format == qsl::OutputFormat::Csv)
                    qsl::write_csv(result.records, std::cout);
                else
                    std::cout << qsl::to_json(result.records, config).dump(2) << '\n';
            } else {
                qsl::emit(result.records, format, out, config);
            }
            for (const auto& v : result.violations)
                std::cerr << "invariant violated: " << v << '\n';
            return result.violations.empty() ? kOk : kNumerical;
        }

        qsl::SweepSpec spec;
        spec.base = config.params;
        spec.eta_list = etas;
        spec.n_max_list = nmaxes;
        spec.t_max = config.t_max;
        spec.steps = config.steps;
        spec.mode = config.mode;
        spec.derivative = config.derivative;
        try {
            spec.validate();
        } catch (const std::exception& e) {
            std::cerr << "invalid configuration: " << e.what() << '\n';
            return kInvalidConfig;
        }

        if (oracle) {
            int code = kOk;
            for (double eta : etas) {
                for (int n : nmaxes) {
                    qsl::ModelParams p = config.params;
                    p.eta = eta;
                    p.n_max = n;
                    if (run_oracle(p, config.mode, config.t_max) != kOk)
                        code = kOracleMismatch;
                }
            }
            if (code != kOk)
                return code;
        }

        const qsl::SweepResult result = qsl::run_sweep(spec, threads);
        const std::filesystem::path dir = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
        std::filesystem::create_directories(dir);
        const std::string ext = format == qsl::OutputFormat::Csv ? ".csv" : ".json";

        for (const auto& entry : result.entries) {
            const std::string name = key_name(entry.eta, entry.n_max);
            if (entry.error) {
                std::cerr << name << ": failed: " << *entry.error << '\n';
                continue;
            }
            qsl::RunConfig key_config = config;
            key_config.params.eta = entry.eta;
            key_config.params.n_max = entry.n_max;
            const std::string path = (dir / (name + ext)).string();
            key_config.outputs = {{format, path}};
            qsl::emit(entry.result.records, format, path, key_config);
            for (const auto& v : entry.result.violations)
                std::cerr << name << ": invariant violated: " << v << '\n';
        }

        const std::string report_path = (dir / "saturation.csv").string();
        std::ofstream report(report_path);
        if (!report)
            throw qsl::Error(qsl::ErrorKind::Io, "cannot open '" + report_path + "'");
        report << "eta,sup_difference,peak_t_lb,ratio,indistinguishable\n";
        for (const auto& row : result.saturation) {
            report << qsl::format_double(row.eta) << ',' << qsl::format_double(row.sup_difference) << ','
                   << qsl::format_double(row.peak_t_lb) << ',' << qsl::format_double(row.ratio) << ','
                   << (row.indistinguishable ? 1 : 0) << '\n';
            std::cerr << "saturation eta=" << qsl::format_double(row.eta) << ": sup|dt_LB|/peak = "
                      << qsl::format_double(row.ratio) << (row.indistinguishable ? " (indistinguishable)" : "") << '\n';
        }
        return result.ok() ? kOk : kNumerical;
    } catch (const qsl::Error& e) {
        std::cerr << "error (" << qsl::to_string(e.kind()) << "): " << e.what() << '\n';
        return e.kind() == qsl::ErrorKind::InvalidConfig ? kInvalidConfig : kNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumerical;
    }
}
