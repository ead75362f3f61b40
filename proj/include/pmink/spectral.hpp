#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

// Trigonometric (Fourier) operations on uniformly sampled periodic data.
// Sample k sits at theta_k = 2*pi*k/M; M must be even.
namespace pmink::spectral {

/// Unnormalized real-to-complex DFT; returns the M/2 + 1 non-negative modes.
std::vector<std::complex<double>> forward(std::span<const double> samples);

/// Inverse of `forward` (including the 1/M normalization).
std::vector<double> inverse(std::span<const std::complex<double>> modes,
                            std::size_t m);

/// Modes smaller than this fraction of the largest one are treated as
/// round-off and dropped before differentiating.
inline constexpr double kRoundoffCutoff = 1e-13;

struct Derivatives {
  std::vector<double> first;
  std::vector<double> second;
};

/// First and second derivative of the trigonometric interpolant at the nodes.
/// The Nyquist mode is dropped from the first derivative and kept in the
/// second, so band-limited data with bandwidth < M/2 is differentiated exactly.
/// Modes below kRoundoffCutoff relative to the largest are discarded.
Derivatives differentiate(std::span<const double> samples);

/// Projects onto modes |k| <= max_mode (sharp cutoff).
std::vector<double> low_pass(std::span<const double> samples, int max_mode);

/// Continuous trigonometric interpolant of a sample sequence.
class Interpolant {
 public:
  explicit Interpolant(std::span<const double> samples);

  struct Jet {
    double value;
    double first;
    double second;
  };

  Jet operator()(double theta) const;

 private:
  std::size_t m_;
  std::vector<std::complex<double>> modes_;
};

}  // namespace pmink::spectral
