#pragma once

// Shared scalar aliases, error types and the validated parameter containers
// (process times, per-time interval endpoints).

#include <algorithm>
#include <complex>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gapdet {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex two_pi_i{0.0, 2.0 * std::numbers::pi};

/// Invalid user-facing parameters (times, endpoints, quadrature settings).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Geometry failures: colliding contours, points that lie on no component.
class ContourError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Near-singular operators and non-finite samples.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Strictly increasing process times tau_1 < ... < tau_n.
class TimeGrid {
 public:
  TimeGrid() = default;
  explicit TimeGrid(std::vector<double> times) : times_(std::move(times)) {
    if (times_.empty()) throw ConfigError("time grid needs at least one time");
    for (std::size_t j = 1; j < times_.size(); ++j) {
      if (!(times_[j] > times_[j - 1])) {
        throw ConfigError("times must be strictly increasing (entry " +
                          std::to_string(j) + ")");
      }
    }
  }

  std::size_t size() const { return times_.size(); }
  double operator[](std::size_t j) const { return times_[j]; }
  double front() const { return times_.front(); }
  double back() const { return times_.back(); }
  std::span<const double> values() const { return times_; }

  /// Smallest gap tau_{j+1} - tau_j, or +inf for a single time.
  double min_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < times_.size(); ++j) gap = std::min(gap, times_[j] - times_[j - 1]);
    return gap;
  }

 private:
  std::vector<double> times_;
};

/// Alternating sign (+1, -1, +1, ...) for a zero-based endpoint index.
constexpr double alternating_sign(std::size_t l) { return (l % 2 == 0) ? 1.0 : -1.0; }

enum class EndpointParity {
  any,   // odd counts close with a semi-infinite interval
  even,  // bounded intervals only
};

/// Sorted endpoints a_j^(1) < ... < a_j^(k_j) for every time j.
///
/// The intervals at time j are [a1,a2] U [a3,a4] U ...; with an odd count the
/// last endpoint opens [a_k, inf). Equal neighbouring endpoints are accepted
/// (a zero-measure interval) so degenerate configurations can be probed.
class EndpointSet {
 public:
  EndpointSet() = default;
  EndpointSet(std::vector<std::vector<double>> per_time, EndpointParity parity)
      : ends_(std::move(per_time)), parity_(parity) {
    for (std::size_t j = 0; j < ends_.size(); ++j) {
      const auto& e = ends_[j];
      if (parity_ == EndpointParity::even && e.size() % 2 != 0) {
        throw ConfigError("time " + std::to_string(j) +
                          ": bounded-interval process needs an even endpoint count");
      }
      for (std::size_t l = 1; l < e.size(); ++l) {
        if (e[l] < e[l - 1]) {
          throw ConfigError("time " + std::to_string(j) + ": endpoints must be sorted");
        }
      }
    }
  }

  std::size_t times() const { return ends_.size(); }
  std::size_t count(std::size_t j) const { return ends_[j].size(); }
  std::span<const double> at(std::size_t j) const { return ends_[j]; }
  double operator()(std::size_t j, std::size_t l) const { return ends_[j][l]; }
  bool semi_infinite(std::size_t j) const { return ends_[j].size() % 2 == 1; }
  EndpointParity parity() const { return parity_; }
  const std::vector<std::vector<double>>& raw() const { return ends_; }

  std::size_t total() const {
    std::size_t k = 0;
    for (const auto& e : ends_) k += e.size();
    return k;
  }

  /// Copy with one endpoint moved by `h` (sorting is not re-checked).
  EndpointSet shifted(std::size_t j, std::size_t l, double h) const {
    EndpointSet out = *this;
    out.ends_[j][l] += h;
    return out;
  }

 private:
  std::vector<std::vector<double>> ends_;
  EndpointParity parity_ = EndpointParity::any;
};

/// Row offsets of the vector-valued IIKS data: row 0 belongs to the outer
/// contour, rows offset[i] .. offset[i]+count(i)-1 to the endpoints of time i.
struct IIKSLayout {
  std::size_t p = 1;
  std::vector<std::size_t> offset;

  static IIKSLayout from(const EndpointSet& ends) {
    IIKSLayout layout;
    layout.offset.resize(ends.times());
    std::size_t row = 1;
    for (std::size_t i = 0; i < ends.times(); ++i) {
      layout.offset[i] = row;
      row += ends.count(i);
    }
    layout.p = row;
    return layout;
  }

  std::size_t row(std::size_t i, std::size_t l) const { return offset[i] + l; }
};

}  // namespace gapdet
