#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hsiu/metrics.hpp"
#include "hsiu/solver.hpp"
#include "hsiu/ulnsa/network.hpp"

namespace hsiu::cli {

/// Process exit codes.
enum ExitCode : int {
    kSuccess = 0,
    kFailure = 1,  ///< assertion or divergence
    kUsage = 2,    ///< bad flags, malformed files, shape mismatches
};

enum class Command { synth, denoise, eval, gradcheck, demo, init_weights };

enum class ParamSource { manual, estimated };

/// Everything a command needs, filled from the command line.
struct RunConfig {
    Command command = Command::demo;
    std::filesystem::path input;
    std::filesystem::path output;
    std::filesystem::path reference;  ///< eval
    std::filesystem::path test;       ///< eval
    std::filesystem::path csv;        ///< eval, optional
    std::filesystem::path trace;      ///< denoise, optional
    std::filesystem::path spec_out;   ///< synth sidecar; defaults to <output>.noise.txt
    std::filesystem::path weights;    ///< denoise / init-weights
    std::filesystem::path out_dir = ".";  ///< demo

    // synth
    int noise_case = 1;
    std::optional<double> stripe_fraction;
    double stripe_amplitude = 0.1;

    // denoise
    int iterations = 5;
    std::string denoiser = "gaussian";
    double gain = 5.0;
    ParamSource params = ParamSource::manual;
    std::vector<double> alpha, beta, gamma, lambda;
    InitPolicy init = InitPolicy::from_observation;
    ulnsa::LnsaConfig lnsa;

    // eval
    double peak = 1.0;
    double scale_ratio = 1.0;

    // gradcheck
    std::string op = "lnsa";

    // init-weights
    std::string weight_kind = "both";
    int bands = 4;
    int height = 64;
    int width = 64;

    std::uint64_t seed = 7;

    /// Throws DomainError on missing paths, mixed parameter sources or list lengths != K.
    void validate() const;
};

/// Settings of the end-to-end demonstration.
struct DemoSettings {
    std::uint64_t seed = 7;
    int iterations = 5;
    std::string denoiser = "gaussian";  ///< or "identity" as a negative control
    int noise_case = 3;
    double gain = 5.0;
    double alpha = 4.0;
    double beta = 25.0;
    double gamma = 0.5;
    double lambda = 0.3;
    double required_gain_db = 3.0;
};

struct DemoResult {
    MetricReport noisy;
    MetricReport denoised;
    double improvement_db = 0.0;
    bool passed = false;
    HsiCube clean, observed, restored;
};

/// Phantom -> noise case -> solver. No file output.
DemoResult run_demo(const DemoSettings& settings);

/// Executes a parsed configuration.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and runs. Never throws.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Comma-separated list of reals.
std::vector<double> parse_list(const std::string& text);

}  // namespace hsiu::cli
