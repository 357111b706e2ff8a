#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <span>
#include <vector>

namespace rlr {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

/// Pulsed Doppler radar configuration. Positive velocities are approaching
/// targets and map to positive Doppler shifts.
class RadarParams {
public:
    /// Throws InvalidArgument unless every value is positive and
    /// prf * 2 * max_range / c <= 1.
    RadarParams(double wavelength_m, double prf_hz, double pulse_width_s, double max_range_m,
                double radar_constant_db);

    double wavelength() const noexcept { return wavelength_; }
    double prf() const noexcept { return prf_; }
    double pulse_width() const noexcept { return pulse_width_; }
    double max_range() const noexcept { return max_range_; }
    double radar_constant() const noexcept { return radar_constant_; }
    /// lambda * PRF / 4
    double nyquist_velocity() const noexcept { return wavelength_ * prf_ / 4.0; }

private:
    double wavelength_;
    double prf_;
    double pulse_width_;
    double max_range_;
    double radar_constant_;
};

struct Scatterer {
    double range_m = 0.0;
    std::complex<double> amplitude{1.0, 0.0};
    double velocity_mps = 0.0;
};

struct ScattererScene {
    std::vector<Scatterer> scatterers;
    std::size_t count() const noexcept { return scatterers.size(); }
};

/// Slow-time complex voltages of one range gate, in sqrt(mW).
struct IqSeries {
    std::vector<std::complex<double>> samples;
    double prf = 0.0;
};

struct SpectrumMoments {
    double power_dbm = 0.0;
    double mean_velocity = 0.0;   // m/s
    double spectrum_width = 0.0;  // m/s
};

double dbm_to_mw(double dbm) noexcept;
double mw_to_dbm(double mw) noexcept;

/// r0 = c tau0 / 2
double range_bin_length(const RadarParams& params) noexcept;
/// floor(R_max / r0); may be zero for a pulse longer than the range window.
std::size_t num_range_bins(const RadarParams& params) noexcept;
/// f_d = 2 v / lambda
double doppler_frequency(double velocity_mps, const RadarParams& params) noexcept;

/// s[p] = sum_k a_k exp(i 2 pi f_d,k p / PRF) for the scatterers sharing one
/// range gate. Requires at least one scatterer inside (0, R_max] and two pulses.
IqSeries synthesize_point_target_iq(const ScattererScene& scene, const RadarParams& params, std::size_t n_pulses);

/// Gaussian power spectral density (mW per m/s) of a weather echo.
/// Throws ZeroWidth when the spectrum width is zero.
std::vector<double> gaussian_psd(std::span<const double> velocity_grid, const SpectrumMoments& moments);

/// Expected periodogram (FFT-shifted, see doppler_velocity_axis) of a weather
/// echo with the given moments in white noise, including spectral aliasing.
std::vector<double> expected_weather_periodogram(const SpectrumMoments& moments, const RadarParams& params,
                                                 std::size_t n_pulses, double noise_power_dbm);

/// Frequency-domain synthesis: complex Gaussian DFT coefficients whose
/// variance is the expected periodogram, inverse transformed. Pass
/// -infinity for a noise-free echo.
IqSeries synthesize_weather_iq(const SpectrumMoments& moments, const RadarParams& params, std::size_t n_pulses,
                               double noise_power_dbm, std::uint64_t seed);

/// |FFT|^2 / N, rearranged so that index N/2 is zero Doppler.
std::vector<double> periodogram(const IqSeries& iq);
/// Radial velocity at each periodogram index.
std::vector<double> doppler_velocity_axis(std::size_t n_pulses, const RadarParams& params);

/// Lag-1 pulse-pair estimator. A known noise power is subtracted from the
/// lag-0 estimate. Throws TooFewSamples below 16 pulses and
/// UnreliableEstimate when |R1| falls under 3 / sqrt(N) of R0 or the signal
/// power is not positive.
SpectrumMoments estimate_moments(const IqSeries& iq, const RadarParams& params,
                                 double noise_power_dbm = -std::numeric_limits<double>::infinity());

/// Z_h = P_rx + C + 20 log10(r / 1 km). Throws NonPositiveRange.
double reflectivity_dbz(double power_dbm, double range_m, const RadarParams& params);

/// "# prf <value>" header followed by "re,im" lines.
IqSeries read_iq(const std::filesystem::path& path);
void write_iq(const std::filesystem::path& path, const IqSeries& iq);

}  // namespace rlr
