#include "rlr/radar.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "rlr/error.hpp"
#include "text_util.hpp"

namespace rlr {

RadarParams::RadarParams(double wavelength_m, double prf_hz, double pulse_width_s, double max_range_m,
                         double radar_constant_db)
    : wavelength_(wavelength_m),
      prf_(prf_hz),
      pulse_width_(pulse_width_s),
      max_range_(max_range_m),
      radar_constant_(radar_constant_db) {
    if (!(wavelength_ > 0.0) || !(prf_ > 0.0) || !(pulse_width_ > 0.0) || !(max_range_ > 0.0) ||
        !(radar_constant_ > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "radar parameters must all be positive");
    }
    if (prf_ * 2.0 * max_range_ / kSpeedOfLight > 1.0) {
        throw Error(ErrorCode::InvalidArgument, "PRF too high for the unambiguous range R_max");
    }
}

double dbm_to_mw(double dbm) noexcept { return std::pow(10.0, dbm / 10.0); }
double mw_to_dbm(double mw) noexcept { return 10.0 * std::log10(mw); }

double range_bin_length(const RadarParams& params) noexcept { return kSpeedOfLight * params.pulse_width() / 2.0; }

std::size_t num_range_bins(const RadarParams& params) noexcept {
    return static_cast<std::size_t>(std::floor(params.max_range() / range_bin_length(params)));
}

double doppler_frequency(double velocity_mps, const RadarParams& params) noexcept {
    return 2.0 * velocity_mps / params.wavelength();
}

IqSeries synthesize_point_target_iq(const ScattererScene& scene, const RadarParams& params, std::size_t n_pulses) {
    if (scene.count() == 0) throw Error(ErrorCode::InvalidArgument, "scene needs at least one scatterer");
    if (n_pulses < 2) throw Error(ErrorCode::TooFewSamples, "need at least two pulses");
    for (const auto& s : scene.scatterers) {
        if (!(s.range_m > 0.0) || s.range_m > params.max_range()) {
            throw Error(ErrorCode::InvalidArgument, "scatterer range outside (0, R_max]");
        }
    }
    IqSeries iq{std::vector<std::complex<double>>(n_pulses), params.prf()};
    for (std::size_t p = 0; p < n_pulses; ++p) {
        std::complex<double> acc{};
        for (const auto& s : scene.scatterers) {
            const double phase = 2.0 * std::numbers::pi * doppler_frequency(s.velocity_mps, params) *
                                 static_cast<double>(p) / params.prf();
            acc += s.amplitude * std::polar(1.0, phase);
        }
        iq.samples[p] = acc;
    }
    return iq;
}

std::vector<double> gaussian_psd(std::span<const double> velocity_grid, const SpectrumMoments& moments) {
    if (moments.spectrum_width == 0.0) throw Error(ErrorCode::ZeroWidth, "spectrum width is zero");
    if (!(moments.spectrum_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectrum width must be positive");
    const double power = dbm_to_mw(moments.power_dbm);
    const double sw = moments.spectrum_width;
    const double norm = power / (sw * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> out(velocity_grid.size());
    std::transform(velocity_grid.begin(), velocity_grid.end(), out.begin(), [&](double v) {
        const double d = v - moments.mean_velocity;
        return norm * std::exp(-d * d / (2.0 * sw * sw));
    });
    return out;
}

std::vector<double> doppler_velocity_axis(std::size_t n_pulses, const RadarParams& params) {
    const double dv = params.wavelength() * params.prf() / (2.0 * static_cast<double>(n_pulses));
    std::vector<double> v(n_pulses);
    const auto half = static_cast<double>(n_pulses / 2);
    for (std::size_t i = 0; i < n_pulses; ++i) v[i] = (static_cast<double>(i) - half) * dv;
    return v;
}

namespace {

void require_moments(const SpectrumMoments& moments, const RadarParams& params) {
    if (moments.spectrum_width == 0.0) throw Error(ErrorCode::ZeroWidth, "spectrum width is zero");
    if (!(moments.spectrum_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "spectrum width must be positive");
    if (std::abs(moments.mean_velocity) > params.nyquist_velocity()) {
        throw Error(ErrorCode::InvalidArgument, "mean velocity beyond the Nyquist velocity");
    }
}

// In-place unnormalized DFT; sign = FFTW_FORWARD or FFTW_BACKWARD.
void dft(std::vector<std::complex<double>>& x, int sign) {
    auto* p = reinterpret_cast<fftw_complex*>(x.data());
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(x.size()), p, p, sign, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
}

}  // namespace

std::vector<double> expected_weather_periodogram(const SpectrumMoments& moments, const RadarParams& params,
                                                 std::size_t n_pulses, double noise_power_dbm) {
    require_moments(moments, params);
    if (n_pulses < 2) throw Error(ErrorCode::TooFewSamples, "need at least two pulses");
    const auto axis = doppler_velocity_axis(n_pulses, params);
    const double interval = 2.0 * params.nyquist_velocity();
    const double dv = interval / static_cast<double>(n_pulses);
    // Fold the Gaussian tails that fall outside the unambiguous interval.
    const int aliases = 1 + static_cast<int>(std::ceil(8.0 * moments.spectrum_width / interval));
    std::vector<double> folded(n_pulses, 0.0);
    for (int a = -aliases; a <= aliases; ++a) {
        std::vector<double> shifted(axis);
        for (double& v : shifted) v += a * interval;
        const auto s = gaussian_psd(shifted, moments);
        for (std::size_t i = 0; i < n_pulses; ++i) folded[i] += s[i];
    }
    const double noise = std::isinf(noise_power_dbm) && noise_power_dbm < 0 ? 0.0 : dbm_to_mw(noise_power_dbm);
    for (double& p : folded) p = static_cast<double>(n_pulses) * p * dv + noise;
    return folded;
}

IqSeries synthesize_weather_iq(const SpectrumMoments& moments, const RadarParams& params, std::size_t n_pulses,
                               double noise_power_dbm, std::uint64_t seed) {
    if (n_pulses < 16) throw Error(ErrorCode::TooFewSamples, "weather synthesis needs at least 16 pulses");
    const auto expected = expected_weather_periodogram(moments, params, n_pulses, noise_power_dbm);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = n_pulses;
    std::vector<std::complex<double>> spectrum(n);
    for (std::size_t i = 0; i < n; ++i) {
        // Shifted index i holds DFT bin (i - n/2) mod n.
        const std::size_t bin = (i + n - n / 2) % n;
        const double scale = std::sqrt(static_cast<double>(n) * expected[i] / 2.0);
        const double re = normal(rng);
        const double im = normal(rng);
        spectrum[bin] = {scale * re, scale * im};
    }
    dft(spectrum, FFTW_BACKWARD);
    for (auto& s : spectrum) s /= static_cast<double>(n);
    return IqSeries{std::move(spectrum), params.prf()};
}

std::vector<double> periodogram(const IqSeries& iq) {
    const std::size_t n = iq.samples.size();
    if (n == 0) throw Error(ErrorCode::TooFewSamples, "empty IQ series");
    std::vector<std::complex<double>> x = iq.samples;
    dft(x, FFTW_FORWARD);
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::norm(x[(i + n - n / 2) % n]) / static_cast<double>(n);
    return out;
}

SpectrumMoments estimate_moments(const IqSeries& iq, const RadarParams& params, double noise_power_dbm) {
    const std::size_t n = iq.samples.size();
    if (n < 16) throw Error(ErrorCode::TooFewSamples, "pulse-pair estimation needs at least 16 pulses");
    double r0 = 0.0;
    std::complex<double> r1{};
    for (std::size_t p = 0; p < n; ++p) {
        r0 += std::norm(iq.samples[p]);
        if (p + 1 < n) r1 += std::conj(iq.samples[p]) * iq.samples[p + 1];
    }
    r0 /= static_cast<double>(n);
    r1 /= static_cast<double>(n - 1);
    const double noise = std::isinf(noise_power_dbm) && noise_power_dbm < 0 ? 0.0 : dbm_to_mw(noise_power_dbm);
    const double signal = r0 - noise;
    const double mag1 = std::abs(r1);
    if (!(signal > 0.0)) throw Error(ErrorCode::UnreliableEstimate, "no signal power above the noise level");
    if (mag1 < 3.0 / std::sqrt(static_cast<double>(n)) * r0) {
        throw Error(ErrorCode::UnreliableEstimate, "lag-1 autocorrelation below the detection floor");
    }
    const double lambda_prf = params.wavelength() * params.prf();
    SpectrumMoments m;
    m.power_dbm = mw_to_dbm(signal);
    m.mean_velocity = lambda_prf / (4.0 * std::numbers::pi) * std::arg(r1);
    const double ratio = signal / mag1;
    m.spectrum_width =
        ratio > 1.0 ? lambda_prf / (2.0 * std::numbers::pi * std::numbers::sqrt2) * std::sqrt(std::log(ratio)) : 0.0;
    return m;
}

double reflectivity_dbz(double power_dbm, double range_m, const RadarParams& params) {
    if (!(range_m > 0.0)) throw Error(ErrorCode::NonPositiveRange, "range must be positive");
    return power_dbm + params.radar_constant() + 20.0 * std::log10(range_m / 1000.0);
}

IqSeries read_iq(const std::filesystem::path& path) {
    const std::string text = detail::slurp(path);
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    IqSeries iq;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = detail::trim(line);
        if (t.empty()) continue;
        if (!have_header) {
            constexpr std::string_view key = "# prf";
            if (t.substr(0, key.size()) != key) throw Error(ErrorCode::Format, path.string() + ": missing '# prf' header");
            iq.prf = detail::parse_double(detail::trim(t.substr(key.size())), path, lineno);
            if (!(iq.prf > 0.0)) throw Error(ErrorCode::Format, path.string() + ": PRF must be positive");
            have_header = true;
            continue;
        }
        const auto f = detail::split(t, ',');
        if (f.size() != 2) throw Error(ErrorCode::Format, path.string() + ":" + std::to_string(lineno) + ": expected re,im");
        iq.samples.emplace_back(detail::parse_double(f[0], path, lineno), detail::parse_double(f[1], path, lineno));
    }
    if (!have_header || iq.samples.empty()) throw Error(ErrorCode::Format, path.string() + ": no IQ samples");
    return iq;
}

void write_iq(const std::filesystem::path& path, const IqSeries& iq) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    std::string line = "# prf ";
    detail::append_double(line, iq.prf);
    os << line << '\n';
    for (const auto& s : iq.samples) {
        line.clear();
        detail::append_double(line, s.real());
        line += ',';
        detail::append_double(line, s.imag());
        os << line << '\n';
    }
    if (!os) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

}  // namespace rlr
