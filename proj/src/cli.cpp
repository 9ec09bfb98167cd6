#include "hsiu/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

#include "hsiu/cube_io.hpp"
#include "hsiu/degradation.hpp"
#include "hsiu/errors.hpp"
#include "hsiu/estimator.hpp"
#include "hsiu/phantom.hpp"
#include "hsiu/ulnsa/gradcheck.hpp"

namespace hsiu::cli {

namespace {

void require_path(const std::filesystem::path& p, const char* flag) {
    if (p.empty()) throw DomainError(std::string("missing required ") + flag);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw FormatError("cannot open " + path.string() + " for writing");
    f << text;
}

std::string fmt(double v, int precision = 6) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream s;
    s << std::fixed << std::setprecision(precision) << v;
    return s.str();
}

void print_report(std::ostream& out, const MetricReport& r) {
    out << "psnr=" << fmt(r.psnr) << '\n' << "ssim=" << fmt(r.ssim) << '\n'
        << "ergas=" << fmt(r.ergas) << '\n';
}

std::unique_ptr<Denoiser> make_denoiser(const RunConfig& cfg, const HsiCube& y,
                                        const WeightStore* file_weights) {
    if (cfg.denoiser == "gaussian") return std::make_unique<GaussianSmoothingDenoiser>(cfg.gain);
    if (cfg.denoiser == "prox-quadratic") return std::make_unique<QuadraticProxDenoiser>();
    if (cfg.denoiser == "identity") return std::make_unique<IdentityDenoiser>();
    if (cfg.denoiser == "ulnsa") {
        WeightStore w;
        if (file_weights && file_weights->contains("ulnsa.embed.weight")) {
            w = *file_weights;
        } else {
            w = ulnsa::make_ulnsa_weights(cfg.lnsa, int(y.bands()), int(y.height()),
                                          int(y.width()), cfg.seed);
        }
        return std::make_unique<ulnsa::UlnsaDenoiser>(std::move(w), cfg.lnsa);
    }
    throw DomainError("unknown denoiser '" + cfg.denoiser + "'");
}

int cmd_synth(const RunConfig& cfg, std::ostream& out) {
    const HsiCube clean = read_cube(cfg.input);
    NoiseSpec spec = case_spec(cfg.noise_case, cfg.seed);
    if (cfg.stripe_fraction) {
        spec.sparse_kind = SparseKind::both;
        spec.stripe_fraction = *cfg.stripe_fraction;
        spec.stripe_amplitude = cfg.stripe_amplitude;
    }
    const HsiCube noisy = apply_noise(clean, spec);
    write_cube(noisy, cfg.output);
    const auto sidecar =
        cfg.spec_out.empty() ? std::filesystem::path(cfg.output.string() + ".noise.txt") : cfg.spec_out;
    write_text(sidecar, to_key_value(spec));
    out << "wrote " << cfg.output.string() << " and " << sidecar.string() << '\n';
    return kSuccess;
}

int cmd_denoise(const RunConfig& cfg, std::ostream& out) {
    std::optional<WeightStore> weights;
    if (!cfg.weights.empty()) weights = read_weights(cfg.weights);
    const HsiCube y = read_cube(cfg.input);

    HyperParams params;
    if (cfg.params == ParamSource::manual) {
        params = {cfg.alpha, cfg.beta, cfg.gamma, cfg.lambda};
    } else {
        params = estimate(y, cfg.iterations, *weights);
    }
    params.validate();

    const auto denoiser = make_denoiser(cfg, y, weights ? &*weights : nullptr);
    SolverOptions opts;
    opts.init = cfg.init;
    if (cfg.denoiser == "prox-quadratic") opts.prior = QuadraticProxDenoiser::prior;
    const auto result = hsiu::run(y, params, *denoiser, opts);
    write_cube(result.x_hat, cfg.output);
    if (!cfg.trace.empty()) write_text(cfg.trace, trace_csv(result.trace));
    out << "iterations=" << params.iterations() << '\n'
        << "denoiser=" << denoiser->name() << '\n'
        << "final_energy=" << fmt(result.trace.back().energy(), 9) << '\n';
    return kSuccess;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
    const HsiCube ref = read_cube(cfg.reference);
    const HsiCube tst = read_cube(cfg.test);
    const MetricReport r = evaluate(ref, tst, cfg.peak, cfg.scale_ratio);
    print_report(out, r);
    if (!cfg.csv.empty()) {
        const bool fresh = !std::filesystem::exists(cfg.csv);
        std::ofstream f(cfg.csv, std::ios::app);
        if (!f) throw FormatError("cannot open " + cfg.csv.string());
        if (fresh) f << "reference,test,psnr,ssim,ergas\n";
        f << cfg.reference.string() << ',' << cfg.test.string() << ',' << fmt(r.psnr) << ','
          << fmt(r.ssim) << ',' << fmt(r.ergas) << '\n';
    }
    return kSuccess;
}

int cmd_gradcheck(const RunConfig& cfg, std::ostream& out) {
    const auto op = ulnsa::parse_grad_op(cfg.op);
    const auto r = ulnsa::gradient_check(op, cfg.seed);
    out << "op=" << ulnsa::to_string(op) << '\n'
        << "coordinates=" << r.coordinates << '\n'
        << "max_relative_error=" << std::scientific << std::setprecision(3)
        << r.max_relative_error << '\n'
        << "threshold=" << r.threshold << std::defaultfloat << '\n'
        << (r.passed ? "PASS" : "FAIL") << '\n';
    return r.passed ? kSuccess : kFailure;
}

int cmd_demo(const RunConfig& cfg, std::ostream& out) {
    DemoSettings s;
    s.seed = cfg.seed;
    s.iterations = cfg.iterations;
    s.denoiser = cfg.denoiser;
    const DemoResult r = run_demo(s);

    std::filesystem::create_directories(cfg.out_dir);
    write_cube(r.clean, cfg.out_dir / "clean.hsic");
    write_cube(r.observed, cfg.out_dir / "noisy.hsic");
    write_cube(r.restored, cfg.out_dir / "denoised.hsic");

    std::ostringstream table;
    table << "cube,psnr,ssim,ergas\n"
          << "noisy," << fmt(r.noisy.psnr, 4) << ',' << fmt(r.noisy.ssim, 4) << ','
          << fmt(r.noisy.ergas, 4) << '\n'
          << "denoised," << fmt(r.denoised.psnr, 4) << ',' << fmt(r.denoised.ssim, 4) << ','
          << fmt(r.denoised.ergas, 4) << '\n';
    write_text(cfg.out_dir / "metrics.csv", table.str());
    out << table.str() << "improvement_db=" << fmt(r.improvement_db, 4) << '\n'
        << (r.passed ? "PASS" : "FAIL") << ": denoised PSNR "
        << (r.passed ? ">=" : "<") << " noisy PSNR + " << fmt(s.required_gain_db, 1) << " dB\n";
    return r.passed ? kSuccess : kFailure;
}

int cmd_init_weights(const RunConfig& cfg, std::ostream& out) {
    WeightStore store;
    const bool est = cfg.weight_kind == "estimator" || cfg.weight_kind == "both";
    const bool net = cfg.weight_kind == "ulnsa" || cfg.weight_kind == "both";
    if (!est && !net) throw DomainError("unknown weight kind '" + cfg.weight_kind + "'");
    if (est) store.merge(make_estimator_weights(cfg.bands, cfg.iterations, cfg.seed));
    if (net) store.merge(ulnsa::make_ulnsa_weights(cfg.lnsa, cfg.bands, cfg.height, cfg.width, cfg.seed));
    write_weights(store, cfg.output);
    out << "wrote " << store.size() << " tensors to " << cfg.output.string() << '\n';
    return kSuccess;
}

}  // namespace

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            throw DomainError("not a number: '" + item + "'");
        }
        if (used != item.size()) throw DomainError("not a number: '" + item + "'");
        values.push_back(v);
    }
    return values;
}

void RunConfig::validate() const {
    switch (command) {
        case Command::synth:
            require_path(input, "--in");
            require_path(output, "--out");
            break;
        case Command::denoise: {
            require_path(input, "--in");
            require_path(output, "--out");
            if (iterations < 1) throw DomainError("--iters must be >= 1");
            const bool any_list = !alpha.empty() || !beta.empty() || !gamma.empty() || !lambda.empty();
            if (params == ParamSource::manual) {
                const auto k = std::size_t(iterations);
                if (alpha.size() != k || beta.size() != k || gamma.size() != k || lambda.size() != k) {
                    throw DomainError("--params manual needs exactly K = " + std::to_string(k) +
                                      " values in each of --alpha/--beta/--gamma/--lambda");
                }
            } else {
                if (any_list) {
                    throw DomainError("--params estimated cannot be combined with manual lists");
                }
                require_path(weights, "--weights");
            }
            break;
        }
        case Command::eval:
            require_path(reference, "--ref");
            require_path(test, "--test");
            break;
        case Command::gradcheck:
            break;
        case Command::demo:
            if (iterations < 1) throw DomainError("--iters must be >= 1");
            break;
        case Command::init_weights:
            require_path(output, "--out");
            break;
    }
}

DemoResult run_demo(const DemoSettings& s) {
    if (s.iterations < 1) throw DomainError("demo: K must be >= 1");
    DemoResult r;
    r.clean = make_phantom(64, 64, 4, s.seed);
    auto [noisy, spec] = synthesize_case(r.clean, s.noise_case, s.seed);
    r.observed = std::move(noisy);

    std::unique_ptr<Denoiser> denoiser;
    if (s.denoiser == "gaussian") {
        denoiser = std::make_unique<GaussianSmoothingDenoiser>(s.gain);
    } else if (s.denoiser == "identity") {
        denoiser = std::make_unique<IdentityDenoiser>();
    } else {
        throw DomainError("demo: denoiser must be gaussian or identity");
    }
    const auto params = HyperParams::constant(std::size_t(s.iterations), s.alpha, s.beta,
                                              s.gamma, s.lambda);
    r.restored = hsiu::run(r.observed, params, *denoiser).x_hat;
    r.noisy = evaluate(r.clean, r.observed);
    r.denoised = evaluate(r.clean, r.restored);
    r.improvement_db = r.denoised.psnr - r.noisy.psnr;
    r.passed = r.improvement_db >= s.required_gain_db;
    return r;
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
        switch (cfg.command) {
            case Command::synth: return cmd_synth(cfg, out);
            case Command::denoise: return cmd_denoise(cfg, out);
            case Command::eval: return cmd_eval(cfg, out);
            case Command::gradcheck: return cmd_gradcheck(cfg, out);
            case Command::demo: return cmd_demo(cfg, out);
            case Command::init_weights: return cmd_init_weights(cfg, out);
        }
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    } catch (const std::invalid_argument& e) {  // shape, domain, degenerate input
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const FormatError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Noise-aware half-quadratic-splitting denoising of hyperspectral cubes"};
    app.require_subcommand(1);
    RunConfig cfg;
    std::string alpha, beta, gamma, lambda, params = "manual", init = "observation";
    std::string stripes_text;

    auto add_lnsa = [&cfg](CLI::App* sub) {
        sub->add_option("--window", cfg.lnsa.window, "attention window side p");
        sub->add_option("--heads", cfg.lnsa.heads, "heads per attention branch");
        sub->add_option("--channels", cfg.lnsa.channels, "base feature width C");
        sub->add_option("--levels", cfg.lnsa.levels, "U-net depth");
    };

    auto* synth = app.add_subcommand("synth", "add one of the four benchmark noise cases");
    synth->add_option("--case", cfg.noise_case, "noise case 1..4")->required();
    synth->add_option("--seed", cfg.seed, "noise seed");
    synth->add_option("--in", cfg.input, "clean HSIC cube")->required();
    synth->add_option("--out", cfg.output, "noisy HSIC cube")->required();
    synth->add_option("--spec-out", cfg.spec_out, "noise sidecar (default <out>.noise.txt)");
    synth->add_option("--stripes", stripes_text, "fraction of columns striped per band");
    synth->add_option("--stripe-amp", cfg.stripe_amplitude, "stripe offset amplitude");

    auto* denoise = app.add_subcommand("denoise", "run the unfolded solver");
    denoise->add_option("--in", cfg.input, "noisy HSIC cube")->required();
    denoise->add_option("--out", cfg.output, "denoised HSIC cube")->required();
    denoise->add_option("--iters", cfg.iterations, "iterations K");
    denoise->add_option("--denoiser", cfg.denoiser, "gaussian | prox-quadratic | ulnsa | identity");
    denoise->add_option("--gain", cfg.gain, "gaussian denoiser: pixels of blur per unit noise level");
    denoise->add_option("--params", params, "manual | estimated");
    denoise->add_option("--alpha", alpha, "K comma-separated values");
    denoise->add_option("--beta", beta, "K comma-separated values");
    denoise->add_option("--gamma", gamma, "K comma-separated values");
    denoise->add_option("--lambda", lambda, "K comma-separated values");
    denoise->add_option("--weights", cfg.weights, "UWT1 weight file");
    denoise->add_option("--seed", cfg.seed, "seed for generated ulnsa weights");
    denoise->add_option("--init", init, "observation | zeros");
    denoise->add_option("--trace", cfg.trace, "per-iteration CSV trace");
    add_lnsa(denoise);

    auto* eval = app.add_subcommand("eval", "PSNR / SSIM / ERGAS of a cube against a reference");
    eval->add_option("--ref", cfg.reference, "reference HSIC cube")->required();
    eval->add_option("--test", cfg.test, "test HSIC cube")->required();
    eval->add_option("--peak", cfg.peak, "signal peak for PSNR/SSIM");
    eval->add_option("--scale-ratio", cfg.scale_ratio, "ERGAS resolution ratio");
    eval->add_option("--csv", cfg.csv, "append a CSV row here");

    auto* grad = app.add_subcommand("gradcheck", "finite-difference check of analytic gradients");
    grad->add_option("--op", cfg.op, "proj | local-attn | nonlocal-attn | spectral-attn | lnsa | ulnsa")
        ->required();
    grad->add_option("--seed", cfg.seed, "weight and input seed");

    auto* demo = app.add_subcommand("demo", "phantom + case-3 noise + baseline solver");
    demo->add_option("--seed", cfg.seed, "scene and noise seed");
    demo->add_option("--out-dir", cfg.out_dir, "where to write cubes and metrics.csv");
    demo->add_option("--iters", cfg.iterations, "iterations K");
    demo->add_option("--denoiser", cfg.denoiser, "gaussian | identity");

    auto* initw = app.add_subcommand("init-weights", "write seeded UWT1 weights");
    initw->add_option("--kind", cfg.weight_kind, "estimator | ulnsa | both");
    initw->add_option("--bands", cfg.bands, "input bands P");
    initw->add_option("--iters", cfg.iterations, "iterations K for the estimator head");
    initw->add_option("--height", cfg.height, "image height (sizes the non-local tables)");
    initw->add_option("--width", cfg.width, "image width");
    initw->add_option("--seed", cfg.seed, "initialization seed");
    initw->add_option("--out", cfg.output, "UWT1 output")->required();
    add_lnsa(initw);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kSuccess : kUsage;
    }

    try {
        if (*synth) {
            cfg.command = Command::synth;
            if (!stripes_text.empty()) cfg.stripe_fraction = std::stod(stripes_text);
        } else if (*denoise) {
            cfg.command = Command::denoise;
            if (params == "manual") {
                cfg.params = ParamSource::manual;
            } else if (params == "estimated") {
                cfg.params = ParamSource::estimated;
            } else {
                throw DomainError("--params must be manual or estimated");
            }
            if (!alpha.empty()) cfg.alpha = parse_list(alpha);
            if (!beta.empty()) cfg.beta = parse_list(beta);
            if (!gamma.empty()) cfg.gamma = parse_list(gamma);
            if (!lambda.empty()) cfg.lambda = parse_list(lambda);
            if (init == "observation") {
                cfg.init = InitPolicy::from_observation;
            } else if (init == "zeros") {
                cfg.init = InitPolicy::zeros;
            } else {
                throw DomainError("--init must be observation or zeros");
            }
        } else if (*eval) {
            cfg.command = Command::eval;
        } else if (*grad) {
            cfg.command = Command::gradcheck;
        } else if (*demo) {
            cfg.command = Command::demo;
        } else {
            cfg.command = Command::init_weights;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return run(cfg, out, err);
}

int main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv{"hsiunfold"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace hsiu::cli
