#include "pmink/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <stdexcept>

namespace pmink::spectral {
namespace {

// FFTW planning is not thread-safe; execution on private buffers is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwBuffers {
  explicit FftwBuffers(std::size_t m)
      : real(fftw_alloc_real(m)), complex(fftw_alloc_complex(m / 2 + 1)) {}
  ~FftwBuffers() {
    fftw_free(real);
    fftw_free(complex);
  }
  FftwBuffers(const FftwBuffers&) = delete;
  FftwBuffers& operator=(const FftwBuffers&) = delete;

  double* real;
  fftw_complex* complex;
};

class Plan {
 public:
  explicit Plan(fftw_plan plan) : plan_(plan) {}
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

std::vector<std::complex<double>> forward(std::span<const double> samples) {
  const std::size_t m = samples.size();
  if (m == 0 || m % 2 != 0) {
    throw std::invalid_argument("spectral::forward: sample count must be even");
  }
  FftwBuffers buf(m);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_r2c_1d(static_cast<int>(m), buf.real, buf.complex,
                               FFTW_ESTIMATE);
  }
  Plan plan(raw);
  for (std::size_t k = 0; k < m; ++k) buf.real[k] = samples[k];
  plan.execute();
  std::vector<std::complex<double>> out(m / 2 + 1);
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k] = {buf.complex[k][0], buf.complex[k][1]};
  }
  return out;
}

std::vector<double> inverse(std::span<const std::complex<double>> modes,
                            std::size_t m) {
  if (m == 0 || m % 2 != 0 || modes.size() != m / 2 + 1) {
    throw std::invalid_argument("spectral::inverse: inconsistent mode count");
  }
  FftwBuffers buf(m);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_c2r_1d(static_cast<int>(m), buf.complex, buf.real,
                               FFTW_ESTIMATE);
  }
  Plan plan(raw);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    buf.complex[k][0] = modes[k].real();
    buf.complex[k][1] = modes[k].imag();
  }
  plan.execute();
  std::vector<double> out(m);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < m; ++k) out[k] = buf.real[k] * scale;
  return out;
}

Derivatives differentiate(std::span<const double> samples) {
  const std::size_t m = samples.size();
  const auto modes = forward(samples);
  std::vector<std::complex<double>> d1(modes.size()), d2(modes.size());
  const std::size_t nyquist = m / 2;
  const std::complex<double> i(0.0, 1.0);
  double largest = 0.0;
  for (const auto& c : modes) largest = std::max(largest, std::abs(c));
  const double cutoff = kRoundoffCutoff * largest;
  for (std::size_t k = 0; k < modes.size(); ++k) {
    const double wave = static_cast<double>(k);
    if (std::abs(modes[k]) < cutoff) {
      // Round-off noise would be amplified by k^2.
      d1[k] = d2[k] = 0.0;
      continue;
    }
    d1[k] = (k == nyquist) ? 0.0 : i * wave * modes[k];
    d2[k] = -wave * wave * modes[k];
  }
  return {inverse(d1, m), inverse(d2, m)};
}

std::vector<double> low_pass(std::span<const double> samples, int max_mode) {
  const std::size_t m = samples.size();
  auto modes = forward(samples);
  for (std::size_t k = 0; k < modes.size(); ++k) {
    if (static_cast<long>(k) > max_mode) modes[k] = 0.0;
  }
  return inverse(modes, m);
}

Interpolant::Interpolant(std::span<const double> samples)
    : m_(samples.size()), modes_(forward(samples)) {}

Interpolant::Jet Interpolant::operator()(double theta) const {
  const std::size_t nyquist = m_ / 2;
  const double inv_m = 1.0 / static_cast<double>(m_);
  Jet jet{modes_[0].real() * inv_m, 0.0, 0.0};
  for (std::size_t k = 1; k <= nyquist; ++k) {
    // Interior modes appear twice in the full spectrum (k and M-k).
    const double weight = (k == nyquist ? 1.0 : 2.0) * inv_m;
    const double wave = static_cast<double>(k);
    const double c = std::cos(wave * theta);
    const double s = std::sin(wave * theta);
    const double re = modes_[k].real();
    const double im = modes_[k].imag();
    jet.value += weight * (re * c - im * s);
    if (k != nyquist) jet.first += weight * wave * (-re * s - im * c);
    jet.second += weight * wave * wave * (-(re * c - im * s));
  }
  return jet;
}

}  // namespace pmink::spectral
