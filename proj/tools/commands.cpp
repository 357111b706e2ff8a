#include "commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>

#include "rlr/completion.hpp"
#include "rlr/error.hpp"
#include "rlr/eval.hpp"
#include "rlr/field.hpp"
#include "rlr/masks.hpp"
#include "rlr/matrix.hpp"
#include "rlr/radar.hpp"

namespace rlr::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct Globals {
    std::uint64_t seed = 0;
    fs::path out;
    MatrixFormat format = MatrixFormat::Csv;
};

void write_json(const fs::path& path, const json& j) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    os << j.dump(2) << '\n';
}

fs::path require_out(const Globals& g, const char* command) {
    if (g.out.empty()) throw Error(ErrorCode::InvalidArgument, std::string(command) + " needs --out");
    return g.out;
}

fs::path with_suffix(const fs::path& p, const std::string& suffix) { return fs::path(p.string() + suffix); }

// synth --------------------------------------------------------------------

struct SynthOptions {
    FieldSpec spec;
    std::optional<double> lowrank_fraction;
    fs::path lowrank_out;
};

void add_synth(CLI::App& app, SynthOptions& o) {
    auto* c = app.add_subcommand("synth", "Synthesize a correlated range x azimuth reflectivity field (dBZ)");
    c->add_option("--rows", o.spec.n_range, "Range gates")->capture_default_str();
    c->add_option("--cols", o.spec.n_azimuth, "Azimuth rays")->capture_default_str();
    c->add_option("--corr-range", o.spec.correlation_length_range, "Correlation length along range (cells)")
        ->capture_default_str();
    c->add_option("--corr-azimuth", o.spec.correlation_length_azimuth, "Correlation length along azimuth (cells)")
        ->capture_default_str();
    c->add_option("--mean", o.spec.mean_dbz, "Mean of wet cells (dBZ)")->capture_default_str();
    c->add_option("--std", o.spec.std_dbz, "Standard deviation of wet cells (dB)")->capture_default_str();
    c->add_option("--coverage", o.spec.coverage_fraction, "Fraction of wet cells")->capture_default_str();
    c->add_option("--floor", o.spec.floor_dbz, "Dry-cell value (dBZ)")->capture_default_str();
    c->add_option("--lowrank", o.lowrank_fraction,
                  "Also write the truncation keeping this fraction of the nonzero singular values");
    c->add_option("--lowrank-out", o.lowrank_out, "Path of the truncated field (default <out>.lowrank)");
}

int cmd_synth(const Globals& g, SynthOptions o) {
    const fs::path out = require_out(g, "synth");
    o.spec.seed = g.seed;
    const DenseMatrix field = synthesize_field(o.spec);
    write_matrix(out, field, g.format);

    json side = {{"synthetic", true},
                 {"rows", o.spec.n_range},
                 {"cols", o.spec.n_azimuth},
                 {"correlation_length_range", o.spec.correlation_length_range},
                 {"correlation_length_azimuth", o.spec.correlation_length_azimuth},
                 {"mean_dbz", o.spec.mean_dbz},
                 {"std_dbz", o.spec.std_dbz},
                 {"coverage_fraction", o.spec.coverage_fraction},
                 {"floor_dbz", o.spec.floor_dbz},
                 {"seed", o.spec.seed},
                 {"realized_coverage", coverage_fraction_of(field, o.spec.floor_dbz)}};
    if (o.lowrank_fraction) {
        const double frac = *o.lowrank_fraction;
        if (!(frac > 0.0 && frac <= 1.0)) throw Error(ErrorCode::InvalidArgument, "--lowrank must lie in (0, 1]");
        const auto f = svd(field);
        const auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(frac * static_cast<double>(f.rank()))));
        const fs::path lr = o.lowrank_out.empty() ? with_suffix(out, ".lowrank") : o.lowrank_out;
        write_matrix(lr, low_rank_approx(f, keep), g.format);
        side["lowrank"] = {{"path", lr.string()}, {"fraction", frac}, {"rank", f.rank()}, {"kept", keep}};
    }
    write_json(with_suffix(out, ".json"), side);
    return kOk;
}

// sample -------------------------------------------------------------------

struct SampleOptions {
    fs::path input;
    std::string scheme = "uniform";
    double fraction = 1.0 / 3.0;
    std::optional<double> dwell_ratio;
};

void add_sample(CLI::App& app, SampleOptions& o) {
    auto* c = app.add_subcommand("sample", "Draw an observation set from a matrix file");
    c->add_option("matrix", o.input, "Input matrix (CSV or binary)")->required()->check(CLI::ExistingFile);
    c->add_option("--scheme", o.scheme, "uniform | azimuth-miss")
        ->check(CLI::IsMember({"uniform", "azimuth-miss"}))
        ->capture_default_str();
    c->add_option("--fraction", o.fraction, "Sampled fraction p")->capture_default_str();
    c->add_option("--dwell-ratio", o.dwell_ratio, "Fully observed column fraction (azimuth-miss, default p/2)");
}

int cmd_sample(const Globals& g, const SampleOptions& o) {
    const fs::path out = require_out(g, "sample");
    const DenseMatrix a = read_matrix(o.input);
    MaskSpec spec;
    spec.scheme = o.scheme == "uniform" ? SamplingScheme::UniformEntries : SamplingScheme::AzimuthMiss;
    spec.fraction = o.fraction;
    spec.rows = a.rows();
    spec.cols = a.cols();
    spec.seed = g.seed;
    spec.dwell_ratio = o.dwell_ratio;
    write_observations(out, apply_mask(a, make_mask(spec)));
    return kOk;
}

// complete -----------------------------------------------------------------

struct CompleteOptions {
    fs::path input;
    std::optional<double> tau;
    std::optional<double> delta;
    std::optional<std::size_t> max_iters;
    std::optional<double> tolerance;
    std::optional<std::size_t> rank_cap;
    fs::path log;
};

void add_complete(CLI::App& app, CompleteOptions& o) {
    auto* c = app.add_subcommand("complete", "Recover the full matrix by singular value thresholding");
    c->add_option("observations", o.input, "Observation set (# m n header, i,j,value lines)")
        ->required()
        ->check(CLI::ExistingFile);
    c->add_option("--tau", o.tau, "Threshold (default 5 sqrt(mn))");
    c->add_option("--delta", o.delta, "Step size (default 1.2 / p)");
    c->add_option("--max-iters", o.max_iters, "Iteration limit (default 500)");
    c->add_option("--tol", o.tolerance, "Relative residual on the observed entries (default 1e-4)");
    c->add_option("--rank-cap", o.rank_cap, "Keep at most this many singular values per step");
    c->add_option("--log", o.log, "Per-iteration residual CSV (default <out>.residuals.csv)");
}

int cmd_complete(const Globals& g, const CompleteOptions& o) {
    const fs::path out = require_out(g, "complete");
    const ObservationSet omega = read_observations(o.input);
    SvtConfig cfg = default_svt_config(omega);
    if (o.tau) cfg.tau = *o.tau;
    if (o.delta) cfg.delta = *o.delta;
    if (o.max_iters) cfg.max_iters = *o.max_iters;
    if (o.tolerance) cfg.tolerance = *o.tolerance;
    cfg.inner_rank_cap = o.rank_cap;

    const SvtResult res = svt_complete(omega, cfg);
    write_matrix(out, res.x_hat, g.format);
    const fs::path log = o.log.empty() ? with_suffix(out, ".residuals.csv") : o.log;
    {
        std::ofstream os(log);
        if (!os) throw Error(ErrorCode::Io, "cannot open " + log.string() + " for writing");
        os << "iteration,relative_residual\n";
        for (std::size_t k = 0; k < res.residual_history.size(); ++k) os << (k + 1) << ',' << res.residual_history[k] << '\n';
    }
    const json summary = {{"converged", res.converged},
                          {"iterations", res.iterations_used},
                          {"final_residual", res.final_residual},
                          {"rank", res.rank_of_solution},
                          {"tau", cfg.tau},
                          {"delta", cfg.delta},
                          {"tolerance", cfg.tolerance}};
    std::cout << summary.dump() << '\n';
    if (!res.converged) {
        std::cerr << "ConvergenceWarning: relative residual " << res.final_residual << " after "
                  << res.iterations_used << " iterations; the threshold scales with the data, try a larger --tau\n";
    }
    return kOk;
}

// eval ---------------------------------------------------------------------

struct EvalOptions {
    fs::path original;
    fs::path lowrank;
    fs::path reconstructed;
    double bin_width = 1.0;
};

void add_eval(CLI::App& app, EvalOptions& o) {
    auto* c = app.add_subcommand("eval", "Relative errors and dBZ histograms of a reconstruction");
    c->add_option("original", o.original, "Original field Z")->required()->check(CLI::ExistingFile);
    c->add_option("lowrank", o.lowrank, "Low-rank field that was sampled")->required()->check(CLI::ExistingFile);
    c->add_option("reconstructed", o.reconstructed, "Reconstructed field")->required()->check(CLI::ExistingFile);
    c->add_option("--bin-width", o.bin_width, "Histogram bin width (dBZ)")->capture_default_str();
}

json histogram_json(const Histogram& h) { return h.counts; }

int cmd_eval(const Globals& g, const EvalOptions& o) {
    const DenseMatrix z = read_matrix(o.original);
    const DenseMatrix zl = read_matrix(o.lowrank);
    const DenseMatrix zr = read_matrix(o.reconstructed);
    const ErrorReport rep = compute_error_report(z, zl, zr);
    const auto edges = shared_bin_edges({&z, &zl, &zr}, o.bin_width);
    const json j = {{"epsilon1", rep.epsilon1},
                    {"epsilon2", rep.epsilon2},
                    {"same_order", rep.same_order},
                    {"definitions",
                     {{"epsilon1", "||Zhat - Zlow||_F / ||Zlow||_F"}, {"epsilon2", "||Zhat - Z||_F / ||Z||_F"}}},
                    {"histograms",
                     {{"bin_edges", edges},
                      {"original", histogram_json(histogram(z, edges))},
                      {"lowrank", histogram_json(histogram(zl, edges))},
                      {"reconstructed", histogram_json(histogram(zr, edges))}}}};
    if (g.out.empty()) {
        std::cout << j.dump(2) << '\n';
    } else {
        write_json(g.out, j);
    }
    return kOk;
}

// render -------------------------------------------------------------------

struct RenderOptions {
    fs::path input;
    fs::path mask;
    fs::path singular_values;
};

void add_render(CLI::App& app, RenderOptions& o) {
    auto* c = app.add_subcommand("render", "Write a grayscale PGM of a matrix and optionally its singular values");
    c->add_option("matrix", o.input, "Matrix file")->required()->check(CLI::ExistingFile);
    c->add_option("--mask", o.mask, "Observation set; unobserved cells render black")->check(CLI::ExistingFile);
    c->add_option("--singular-values", o.singular_values, "Write the descending singular values as CSV");
}

int cmd_render(const Globals& g, const RenderOptions& o) {
    const fs::path out = require_out(g, "render");
    const DenseMatrix a = read_matrix(o.input);
    std::optional<ObservationSet> mask;
    if (!o.mask.empty()) mask = read_observations(o.mask);
    write_pgm(out, a.rows(), a.cols(), render_gray(a, mask ? &*mask : nullptr));
    if (!o.singular_values.empty()) {
        std::ofstream os(o.singular_values);
        if (!os) throw Error(ErrorCode::Io, "cannot open " + o.singular_values.string() + " for writing");
        os.precision(17);
        os << "index,singular_value\n";
        const auto prof = singular_value_profile(a);
        for (std::size_t k = 0; k < prof.size(); ++k) os << (k + 1) << ',' << prof[k] << '\n';
    }
    return kOk;
}

// iq -----------------------------------------------------------------------

struct IqOptions {
    double wavelength = 0.032;
    double prf = 2000.0;
    double pulse_width = 1e-6;
    double max_range = 30000.0;
    double radar_constant = 70.0;
    std::size_t pulses = 64;
    double power_dbm = -30.0;
    double velocity = 6.0;
    double width = 3.5;
    double noise_dbm = -70.0;
    double range = 10000.0;
    std::vector<double> targets;
};

void add_iq(CLI::App& app, IqOptions& o) {
    auto* c = app.add_subcommand("iq", "Simulate one range gate of slow-time IQ and estimate its spectral moments");
    c->add_option("--wavelength", o.wavelength, "Wavelength (m)")->capture_default_str();
    c->add_option("--prf", o.prf, "Pulse repetition frequency (Hz)")->capture_default_str();
    c->add_option("--pulse-width", o.pulse_width, "Pulse width (s)")->capture_default_str();
    c->add_option("--max-range", o.max_range, "Maximum range (m)")->capture_default_str();
    c->add_option("--radar-constant", o.radar_constant, "Radar constant (dB)")->capture_default_str();
    c->add_option("--pulses", o.pulses, "Number of pulses")->capture_default_str();
    c->add_option("--power", o.power_dbm, "Mean received power (dBm)")->capture_default_str();
    c->add_option("--velocity", o.velocity, "Mean radial velocity (m/s, positive = approaching)")->capture_default_str();
    c->add_option("--width", o.width, "Spectrum width (m/s)")->capture_default_str();
    c->add_option("--noise", o.noise_dbm, "White noise power (dBm)")->capture_default_str();
    c->add_option("--range", o.range, "Gate range for the reflectivity estimate (m)")->capture_default_str();
    c->add_option("--target", o.targets,
                  "Point target velocity (m/s, repeatable); replaces the weather echo with unit scatterers");
}

int cmd_iq(const Globals& g, const IqOptions& o) {
    const RadarParams params(o.wavelength, o.prf, o.pulse_width, o.max_range, o.radar_constant);
    if (num_range_bins(params) == 0) {
        std::cerr << "ConfigWarning: the pulse is longer than the range window; no complete range bin fits\n";
    }
    IqSeries iq;
    if (o.targets.empty()) {
        iq = synthesize_weather_iq({o.power_dbm, o.velocity, o.width}, params, o.pulses, o.noise_dbm, g.seed);
    } else {
        ScattererScene scene;
        for (double v : o.targets) scene.scatterers.push_back({std::min(o.range, params.max_range()), {1.0, 0.0}, v});
        iq = synthesize_point_target_iq(scene, params, o.pulses);
    }
    if (!g.out.empty()) write_iq(g.out, iq);

    json j = {{"range_bin_length_m", range_bin_length(params)},
              {"num_range_bins", num_range_bins(params)},
              {"nyquist_velocity", params.nyquist_velocity()},
              {"periodogram", periodogram(iq)},
              {"velocity_axis", doppler_velocity_axis(iq.samples.size(), params)}};
    try {
        const auto m = estimate_moments(iq, params, o.targets.empty() ? o.noise_dbm : -std::numeric_limits<double>::infinity());
        j["moments"] = {{"power_dbm", m.power_dbm},
                        {"mean_velocity", m.mean_velocity},
                        {"spectrum_width", m.spectrum_width},
                        {"reflectivity_dbz", reflectivity_dbz(m.power_dbm, o.range, params)}};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::UnreliableEstimate && e.code() != ErrorCode::TooFewSamples) throw;
        j["moments"] = nullptr;
        j["moments_error"] = e.what();
    }
    std::cout << j.dump() << '\n';
    return kOk;
}

int exit_code_for(const Error& e) {
    switch (e.code()) {
        case ErrorCode::Divergence: return kDivergence;
        case ErrorCode::Io: return kFailure;
        default: return kValidation;
    }
}

}  // namespace

int run(int argc, char** argv) {
    CLI::App app{"Low-rank completion of sparsely sampled weather radar reflectivity"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key=value configuration file; command-line flags take precedence");
    app.footer("Velocities are positive for approaching targets (positive Doppler shift).\n"
               "Exit codes: 0 success, 1 I/O failure, 2 validation error, 3 solver divergence.\n"
               "RADAR_LOWRANK_THREADS caps internal parallelism.");

    Globals g;
    std::string format = "csv";
    app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
    app.add_option("--out", g.out, "Output path");
    app.add_option("--format", format, "Matrix output format")->check(CLI::IsMember({"csv", "bin"}))->capture_default_str();

    SynthOptions synth;
    SampleOptions sample;
    CompleteOptions complete;
    EvalOptions eval;
    RenderOptions render;
    IqOptions iq;
    add_synth(app, synth);
    add_sample(app, sample);
    add_complete(app, complete);
    add_eval(app, eval);
    add_render(app, render);
    add_iq(app, iq);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }
    g.format = format == "bin" ? MatrixFormat::Binary : MatrixFormat::Csv;

    try {
        if (app.got_subcommand("synth")) return cmd_synth(g, synth);
        if (app.got_subcommand("sample")) return cmd_sample(g, sample);
        if (app.got_subcommand("complete")) return cmd_complete(g, complete);
        if (app.got_subcommand("eval")) return cmd_eval(g, eval);
        if (app.got_subcommand("render")) return cmd_render(g, render);
        if (app.got_subcommand("iq")) return cmd_iq(g, iq);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kValidation;
}

}  // namespace rlr::cli
