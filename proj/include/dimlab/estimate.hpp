#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace dimlab {

class PointCloud;

/// How per-scale exponents are reduced to a single number.
///  - slope: least-squares slope of log(quantity) against -log r, i.e. the
///    exponent extrapolated to r -> 0.
///  - lower / upper: min / max of the exponents over the finest
///    `kWindow` scales (finite-scale stand-ins for liminf / limsup).
enum class Aggregate { lower, upper, slope };

inline constexpr int kWindow = 3;
inline constexpr double kBisectionTolerance = 1e-3;

std::string_view to_string(Aggregate mode);
Aggregate parse_aggregate(std::string_view name);

/// Strictly decreasing scales in (0,1).
struct ScaleGrid {
  std::vector<double> r_values;

  /// r_k = 2^-k for k = k_min..k_max.
  static ScaleGrid dyadic(int k_min, int k_max);
  /// 2^-k from k = 6 to floor(log2(1/resolution)) - 2.
  static ScaleGrid for_cloud(const PointCloud& e);

  /// Throws ScaleError / DiagnosticsError when unusable with `e`.
  void validate(const PointCloud& e, std::size_t min_scales = 4) const;
  std::size_t size() const { return r_values.size(); }
};

/// One evaluation recorded during an estimate (dumped as CSV by the CLI).
struct TraceRow {
  double s;
  double r;
  double value;  // cover sum, box count or capacity
  double exponent;
  double gap = 0.0;  // solver duality gap, capacity only
};

struct DimensionEstimate {
  double value = 0.0;
  Aggregate mode = Aggregate::slope;
  double r_min = 0.0;
  double r_max = 0.0;
  double bracket_lo = 0.0;
  double bracket_hi = 0.0;
  std::vector<double> scales;
  std::vector<double> exponents;  // per-scale exponents at `value`
  double residual = 0.0;          // RMS residual of the log-log fit
  bool trusted = true;
  std::vector<std::string> notes;
  /// Named secondary numbers (e.g. an upper-envelope variant).
  std::vector<std::pair<std::string, double>> extras;
  std::vector<TraceRow> trace;
};

struct LineFit {
  double slope;
  double intercept;
  double rms_residual;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Reduces per-scale exponents e_k (at scales r_k) with `mode`.
double aggregate(const std::vector<double>& scales,
                 const std::vector<double>& exponents, Aggregate mode);

/// Finds the s in [0, s_max] at which aggregate(exponents_at(s)) crosses 0.
/// The aggregate is assumed decreasing in s. Endpoints are returned when it
/// does not change sign.
DimensionEstimate bisect_dimension(
    const ScaleGrid& grid, double s_max, Aggregate mode,
    const std::function<std::vector<double>(double)>& exponents_at);

}  // namespace dimlab
