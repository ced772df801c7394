#include "qcdma/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <fftw3.h>

#include "qcdma/csv.hpp"

namespace qcdma::spectral {

namespace {

constexpr double kSpeedOfLight = 299792458.0; // [m/s]

std::vector<double> make_window(Window w, std::size_t n) {
    std::vector<double> out(n, 1.0);
    if (w == Window::Hann) {
        for (std::size_t i = 0; i < n; ++i)
            out[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                           static_cast<double>(n)));
    }
    return out;
}

// Linear interpolation of S at omega inside the grid.
double interp(const PowerSpectrum& s, double omega) {
    const auto it = std::lower_bound(s.omega.begin(), s.omega.end(), omega);
    if (it == s.omega.begin()) return s.density.front();
    if (it == s.omega.end()) return s.density.back();
    const std::size_t hi = static_cast<std::size_t>(it - s.omega.begin());
    const std::size_t lo = hi - 1;
    const double t = (omega - s.omega[lo]) / (s.omega[hi] - s.omega[lo]);
    return s.density[lo] + t * (s.density[hi] - s.density[lo]);
}

} // namespace

void EomParams::validate() const {
    if (!(carrier > 0 && refractive_index > 0 && eo_coefficient > 0 && length > 0 &&
          thickness > 0 && round_trip > 0))
        throw ConfigError("EomParams: all fields must be strictly positive");
}

double EomParams::gain() const {
    const double n3 = refractive_index * refractive_index * refractive_index;
    return -carrier * n3 * eo_coefficient * length / (kSpeedOfLight * thickness * round_trip);
}

double PowerSpectrum::total_power() const {
    double acc = 0.0;
    for (std::size_t i = 1; i < omega.size(); ++i)
        acc += 0.5 * (density[i] + density[i - 1]) * (omega[i] - omega[i - 1]);
    return acc;
}

void Band::validate() const {
    if (!(omega_lower > 0 && omega_upper > omega_lower))
        throw ConfigError("Band: requires 0 < omega_lower < omega_upper");
}

SignalTrace detuning_from_voltage(const std::vector<double>& voltage, double dt,
                                  const EomParams& e) {
    e.validate();
    return detuning_from_voltage(voltage, dt, e.gain());
}

SignalTrace detuning_from_voltage(const std::vector<double>& voltage, double dt, double gain) {
    if (!(dt > 0)) throw ConfigError("detuning_from_voltage: dt must be positive");
    SignalTrace out;
    out.dt = dt;
    out.values.resize(voltage.size());
    for (std::size_t i = 0; i < voltage.size(); ++i) {
        if (!std::isfinite(voltage[i]))
            throw ConfigError("detuning_from_voltage: non-finite voltage sample");
        out.values[i] = gain * voltage[i];
    }
    return out;
}

PhaseTrace accumulate_phase(const SignalTrace& s) {
    if (s.values.size() < 2) throw ConfigError("accumulate_phase: need at least 2 samples");
    PhaseTrace out;
    out.dt = s.dt;
    out.values.resize(s.values.size());
    out.values[0] = 0.0;
    for (std::size_t i = 1; i < s.values.size(); ++i)
        out.values[i] = out.values[i - 1] + 0.5 * s.dt * (s.values[i] + s.values[i - 1]);
    return out;
}

PowerSpectrum estimate_psd(const SignalTrace& s, const WelchOptions& opts) {
    const std::size_t nseg = opts.segment_length;
    if (nseg < 4) throw ConfigError("estimate_psd: segment length too small");
    if (!(opts.overlap >= 0.0 && opts.overlap < 1.0))
        throw ConfigError("estimate_psd: overlap must lie in [0,1)");
    if (s.values.size() < nseg)
        throw ConfigError("estimate_psd: trace shorter than one segment");

    const std::size_t hop =
        std::max<std::size_t>(1, static_cast<std::size_t>(
                                     std::llround(static_cast<double>(nseg) * (1.0 - opts.overlap))));

    double mean = 0.0;
    if (opts.remove_mean)
        mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) /
               static_cast<double>(s.values.size());

    const std::vector<double> window = make_window(opts.window, nseg);
    const double u = std::inner_product(window.begin(), window.end(), window.begin(), 0.0) /
                     static_cast<double>(nseg);

    const std::size_t nbins = nseg / 2 + 1;
    std::vector<double> accum(nbins, 0.0);

    std::vector<double> in(nseg);
    std::vector<std::complex<double>> out(nbins);
    fftw_plan plan = fftw_plan_dft_r2c_1d(static_cast<int>(nseg), in.data(),
                                          reinterpret_cast<fftw_complex*>(out.data()),
                                          FFTW_ESTIMATE);

    std::size_t count = 0;
    for (std::size_t start = 0; start + nseg <= s.values.size(); start += hop, ++count) {
        for (std::size_t i = 0; i < nseg; ++i)
            in[i] = (s.values[start + i] - mean) * window[i];
        fftw_execute(plan);
        for (std::size_t k = 0; k < nbins; ++k)
            accum[k] += std::norm(out[k]);
    }
    fftw_destroy_plan(plan);

    // one-sided density per Hz, then converted to angular frequency
    const double scale = s.dt / (static_cast<double>(nseg) * u * static_cast<double>(count));
    PowerSpectrum psd;
    psd.omega.resize(nbins);
    psd.density.resize(nbins);
    const double domega = 2.0 * M_PI / (static_cast<double>(nseg) * s.dt);
    for (std::size_t k = 0; k < nbins; ++k) {
        psd.omega[k] = domega * static_cast<double>(k);
        const double onesided = (k == 0 || k == nbins - 1) ? 1.0 : 2.0;
        psd.density[k] = onesided * accum[k] * scale / (2.0 * M_PI);
    }
    return psd;
}

double correction_factor(const PowerSpectrum& spectrum, const Band& band) {
    band.validate();
    if (spectrum.omega.size() < 2) throw ConfigError("correction_factor: spectrum too short");
    if (band.omega_upper > spectrum.omega.back())
        throw ConfigError("correction_factor: band exceeds spectrum support");

    // integrand S/omega^2 on grid points inside the band plus interpolated endpoints
    std::vector<double> xs, ys;
    xs.push_back(band.omega_lower);
    ys.push_back(interp(spectrum, band.omega_lower) / (band.omega_lower * band.omega_lower));
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        const double w = spectrum.omega[i];
        if (w > band.omega_lower && w < band.omega_upper)
            xs.push_back(w), ys.push_back(spectrum.density[i] / (w * w));
    }
    xs.push_back(band.omega_upper);
    ys.push_back(interp(spectrum, band.omega_upper) / (band.omega_upper * band.omega_upper));

    double integral = 0.0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        integral += 0.5 * (ys[i] + ys[i - 1]) * (xs[i] - xs[i - 1]);
    return std::exp(-M_PI * integral);
}

std::complex<double> empirical_phase_average(const PhaseTrace& theta, double transient_time) {
    const std::size_t start = static_cast<std::size_t>(transient_time / theta.dt);
    if (start >= theta.values.size())
        throw ConfigError("empirical_phase_average: trace shorter than transient");
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t i = start; i < theta.values.size(); ++i)
        acc += std::polar(1.0, theta.values[i]);
    return acc / static_cast<double>(theta.values.size() - start);
}

double bandwidth_at_level(const PowerSpectrum& spectrum, double rel_db) {
    if (spectrum.density.empty()) throw ConfigError("bandwidth_at_level: empty spectrum");
    const double peak = *std::max_element(spectrum.density.begin(), spectrum.density.end());
    if (!(peak > 0)) return 0.0;
    const double floor = peak * std::pow(10.0, -rel_db / 10.0);
    for (std::size_t i = spectrum.omega.size(); i-- > 0;) {
        if (spectrum.density[i] >= floor) return spectrum.omega[i] / (2.0 * M_PI);
    }
    return 0.0;
}

Band band_for_bandwidth(double bandwidth_hz, double lower_frac, double upper_frac) {
    if (!(bandwidth_hz > 0 && lower_frac > 0 && upper_frac > lower_frac))
        throw ConfigError("band_for_bandwidth: invalid band rule");
    return {2.0 * M_PI * lower_frac * bandwidth_hz, 2.0 * M_PI * upper_frac * bandwidth_hz};
}

void write_csv(std::ostream& os, const PowerSpectrum& spectrum) {
    os << "omega_rad_s,S\n";
    for (std::size_t i = 0; i < spectrum.omega.size(); ++i) {
        std::string line;
        append_cell(line, spectrum.omega[i]);
        append_cell(line, spectrum.density[i]);
        line.push_back('\n');
        os << line;
    }
}

void write_csv(std::ostream& os, const SignalTrace& trace) {
    os << "t,delta\n";
    for (std::size_t i = 0; i < trace.values.size(); ++i) {
        std::string line;
        append_cell(line, trace.dt * static_cast<double>(i));
        append_cell(line, trace.values[i]);
        line.push_back('\n');
        os << line;
    }
}

} // namespace qcdma::spectral
