#pragma once

// Reference trajectory generators. Each path is a closed-form curve driven by
// a phase variable; the speed profile sets the phase rate and a quintic blend
// makes ramps C^3, so every generator delivers exact planar derivatives up to
// third order (evaluated with Jet3 arithmetic, not finite differences).
//
// Phase equals arc length for lines, circles and polyline segments. For the
// lemniscate and inside polyline corner blends the parameterization factor
// |dX/ds| differs from one; min_speed() certifies a lower bound on the actual
// planar speed so planners can check it against their singularity floor.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diffdrive/jet.hpp"
#include "diffdrive/state.hpp"

namespace diffdrive {

// One point of a reference trajectory with time derivatives to order three.
struct TrajectorySample {
  double t = 0.0;
  double x = 0.0, y = 0.0;        // m
  double dx = 0.0, dy = 0.0;      // m/s
  double ddx = 0.0, ddy = 0.0;    // m/s^2
  double dddx = 0.0, dddy = 0.0;  // m/s^3
};

enum class PathKind { line, circle, lemniscate, polyline };

struct SpeedProfile {
  double cruise = 0.5;      // m/s, phase rate after the ramp
  double ramp_time = 0.0;   // s, quintic blend from ramp_start to cruise; 0 = constant
  double ramp_start = 0.0;  // m/s, phase rate at t0 (used when ramp_time > 0)

  friend bool operator==(const SpeedProfile&, const SpeedProfile&) = default;
};

struct TrajectorySpec {
  PathKind kind = PathKind::circle;
  double t0 = 0.0;        // s
  double duration = 20.0; // s
  SpeedProfile speed;

  // line
  double start_x = 0.0, start_y = 0.0;  // m
  double heading = 0.0;                 // rad

  // circle and lemniscate share the center
  double center_x = 0.0, center_y = 0.0;            // m
  double radius = 1.0;                              // m, circle
  double start_angle = -std::numbers::pi / 2.0;     // rad, circle
  bool clockwise = false;                           // circle
  double scale = 1.0;                               // m, lemniscate vertex distance
  double start_phase = std::numbers::pi / 2.0;      // rad, lemniscate parameter at t0

  // polyline
  std::vector<Vec2> waypoints;
  double corner_smoothing = 0.2;  // m, phase half-length of each corner blend

  friend bool operator==(const TrajectorySpec&, const TrajectorySpec&) = default;
};

class Trajectory {
 public:
  explicit Trajectory(TrajectorySpec spec) : spec_(std::move(spec)) {
    validate_profile();
    total_phase_ = phase(spec_.t0 + spec_.duration).f;
    build_geometry();
  }

  // Evaluates the reference at absolute time t in [t0, t0 + duration]
  // (tiny rounding slack allowed). Throws std::out_of_range otherwise.
  TrajectorySample sample(double t) const {
    const double hi = spec_.t0 + spec_.duration;
    const double slack = 1e-9 * std::max(1.0, std::abs(spec_.t0) + spec_.duration);
    if (!(t >= spec_.t0 - slack && t <= hi + slack))
      throw std::out_of_range("trajectory: t=" + std::to_string(t) +
                              " s outside [" + std::to_string(spec_.t0) + ", " +
                              std::to_string(hi) + "]");
    const double tc = std::clamp(t, spec_.t0, hi);
    Jet3 s = phase(tc);
    s.f = std::clamp(s.f, 0.0, total_phase_);
    const auto [xj, yj] = geometry(s);
    return {t, xj.f, yj.f, xj.d1, yj.d1, xj.d2, yj.d2, xj.d3, yj.d3};
  }

  // Certified lower bound on the planar reference speed over the whole run.
  double min_speed() const { return profile_min_ * geometry_min_scale_; }

  double total_phase() const { return total_phase_; }
  const TrajectorySpec& spec() const { return spec_; }

 private:
  // Corner blend: septic polynomial in tau = (s - s_begin)/span matching
  // position, tangent and zero curvature/jerk of the straight segments at
  // both ends, so the spliced path stays C^3 in phase.
  struct Blend {
    double s_begin = 0.0, span = 0.0;
    std::array<double, 8> ax{}, ay{};
  };

  void validate_profile() const {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("trajectory: " + msg); };
    if (!std::isfinite(spec_.t0)) bad("t0 must be finite");
    if (!(spec_.duration > 0.0) || !std::isfinite(spec_.duration)) bad("duration must be positive");
    const auto& sp = spec_.speed;
    if (!(sp.cruise > 0.0) || !std::isfinite(sp.cruise)) bad("cruise speed must be positive");
    if (!(sp.ramp_time >= 0.0) || !std::isfinite(sp.ramp_time)) bad("ramp_time must be non-negative");
    if (sp.ramp_time > spec_.duration) bad("ramp_time exceeds the duration");
    if (sp.ramp_time > 0.0 && (!(sp.ramp_start > 0.0) || !std::isfinite(sp.ramp_start)))
      bad("ramp_start speed must be positive when a ramp is requested");
  }

  // Phase covered since t0, as a jet in time. C^3 by construction: the ramp
  // integrates the quintic smoothstep q(tau) = 6 tau^5 - 15 tau^4 + 10 tau^3.
  Jet3 phase(double t) const {
    const Jet3 tt = Jet3::variable(t) - spec_.t0;
    const auto& sp = spec_.speed;
    if (sp.ramp_time <= 0.0) return tt * sp.cruise;
    if (t - spec_.t0 >= sp.ramp_time) {
      const double ramp_phase = 0.5 * (sp.ramp_start + sp.cruise) * sp.ramp_time;
      return (tt - sp.ramp_time) * sp.cruise + ramp_phase;
    }
    const Jet3 tau = tt / sp.ramp_time;
    const Jet3 tau2 = tau * tau;
    const Jet3 q_integral = (tau2 * tau2) * (2.5 + tau * (tau - 3.0));
    return tt * sp.ramp_start +
           q_integral * ((sp.cruise - sp.ramp_start) * sp.ramp_time);
  }

  std::pair<Jet3, Jet3> geometry(const Jet3& s) const {
    switch (spec_.kind) {
      case PathKind::line: {
        return {s * std::cos(spec_.heading) + spec_.start_x,
                s * std::sin(spec_.heading) + spec_.start_y};
      }
      case PathKind::circle: {
        const double turn = spec_.clockwise ? -1.0 : 1.0;
        const Jet3 ang = s * (turn / spec_.radius) + spec_.start_angle;
        return {cos(ang) * spec_.radius + spec_.center_x,
                sin(ang) * spec_.radius + spec_.center_y};
      }
      case PathKind::lemniscate: {
        // Bernoulli lemniscate, rational form: bounded derivatives everywhere,
        // including the center crossing.
        const double A = spec_.scale;
        const Jet3 u = s * (1.0 / A) + spec_.start_phase;
        const Jet3 su = sin(u), cu = cos(u);
        const Jet3 g = su * su + 1.0;
        return {cu * A / g + spec_.center_x, su * cu * A / g + spec_.center_y};
      }
      case PathKind::polyline:
        return polyline_point(s);
    }
    throw std::logic_error("trajectory: unknown path kind");
  }

  std::pair<Jet3, Jet3> polyline_point(const Jet3& s) const {
    // Blends are disjoint and sorted; between them the path is straight.
    for (const Blend& b : blends_) {
      if (s.f < b.s_begin) break;
      if (s.f <= b.s_begin + b.span) {
        const Jet3 tau = (s - b.s_begin) / b.span;
        return {horner(b.ax, tau), horner(b.ay, tau)};
      }
    }
    std::size_t seg = segment_starts_.size() - 1;
    while (seg > 0 && s.f < segment_starts_[seg]) --seg;
    const Jet3 along = s - segment_starts_[seg];
    return {along * seg_dir_[seg].x + seg_base_[seg].x,
            along * seg_dir_[seg].y + seg_base_[seg].y};
  }

  static Jet3 horner(const std::array<double, 8>& c, const Jet3& tau) {
    Jet3 acc = Jet3::constant(c[7]);
    for (int k = 6; k >= 0; --k) acc = acc * tau + c[k];
    return acc;
  }

  // Gaussian elimination with partial pivoting on a 4x4 system, two RHS.
  static std::array<std::array<double, 2>, 4> solve4(
      std::array<std::array<double, 4>, 4> m, std::array<std::array<double, 2>, 4> rhs) {
    for (int col = 0; col < 4; ++col) {
      int piv = col;
      for (int r = col + 1; r < 4; ++r)
        if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
      std::swap(m[col], m[piv]);
      std::swap(rhs[col], rhs[piv]);
      for (int r = col + 1; r < 4; ++r) {
        const double f = m[r][col] / m[col][col];
        for (int c = col; c < 4; ++c) m[r][c] -= f * m[col][c];
        rhs[r][0] -= f * rhs[col][0];
        rhs[r][1] -= f * rhs[col][1];
      }
    }
    std::array<std::array<double, 2>, 4> out{};
    for (int r = 3; r >= 0; --r) {
      for (int j = 0; j < 2; ++j) {
        double acc = rhs[r][j];
        for (int c = r + 1; c < 4; ++c) acc -= m[r][c] * out[c][j];
        out[r][j] = acc / m[r][r];
      }
    }
    return out;
  }

  void build_geometry() {
    auto bad = [](const std::string& msg) { throw std::invalid_argument("trajectory: " + msg); };
    profile_min_ = spec_.speed.ramp_time > 0.0
                       ? std::min(spec_.speed.ramp_start, spec_.speed.cruise)
                       : spec_.speed.cruise;
    geometry_min_scale_ = 1.0;

    switch (spec_.kind) {
      case PathKind::line:
        return;
      case PathKind::circle:
        if (!(spec_.radius > 0.0) || !std::isfinite(spec_.radius)) bad("radius must be positive");
        return;
      case PathKind::lemniscate: {
        if (!(spec_.scale > 0.0) || !std::isfinite(spec_.scale)) bad("scale must be positive");
        // One full parameter period in phase units.
        const double period = 2.0 * std::numbers::pi * spec_.scale;
        geometry_min_scale_ = min_param_scale(0.0, period, 4096);
        return;
      }
      case PathKind::polyline: {
        const auto& w = spec_.waypoints;
        if (w.size() < 2) bad("polyline needs at least 2 waypoints");
        const double b = spec_.corner_smoothing;
        if (!(b > 0.0) || !std::isfinite(b)) bad("corner_smoothing must be positive");
        const std::size_t nseg = w.size() - 1;
        seg_base_.resize(nseg);
        seg_dir_.resize(nseg);
        segment_starts_.resize(nseg);
        std::vector<double> len(nseg);
        double s_acc = 0.0;
        for (std::size_t i = 0; i < nseg; ++i) {
          const double ex = w[i + 1].x - w[i].x, ey = w[i + 1].y - w[i].y;
          len[i] = std::hypot(ex, ey);
          if (!(len[i] > 1e-12))
            bad("zero-length segment at waypoint " + std::to_string(i));
          seg_base_[i] = w[i];
          seg_dir_[i] = {ex / len[i], ey / len[i]};
          segment_starts_[i] = s_acc;
          s_acc += len[i];
        }
        path_length_ = s_acc;
        for (std::size_t i = 0; i < nseg; ++i) {
          const double used = (i > 0 ? b : 0.0) + (i + 1 < nseg ? b : 0.0);
          if (used > len[i] * (1.0 - 1e-12))
            bad("corner_smoothing too large for segment " + std::to_string(i));
        }
        for (std::size_t c = 1; c < nseg; ++c) {
          Blend bl;
          bl.span = 2.0 * b;
          bl.s_begin = segment_starts_[c] - b;
          const Vec2 din = seg_dir_[c - 1], dout = seg_dir_[c];
          const Vec2 corner = w[c];
          const Vec2 pin{corner.x - b * din.x, corner.y - b * din.y};
          const Vec2 pout{corner.x + b * dout.x, corner.y + b * dout.y};
          // a0..a3 pinned by the inbound segment; a4..a7 solved to meet the
          // outbound one with zero 2nd/3rd derivative at both ends.
          const double a0x = pin.x, a1x = bl.span * din.x;
          const double a0y = pin.y, a1y = bl.span * din.y;
          const std::array<std::array<double, 4>, 4> M{{{1, 1, 1, 1},
                                                        {4, 5, 6, 7},
                                                        {12, 20, 30, 42},
                                                        {24, 60, 120, 210}}};
          const std::array<std::array<double, 2>, 4> rhs{{
              {pout.x - a0x - a1x, pout.y - a0y - a1y},
              {bl.span * dout.x - a1x, bl.span * dout.y - a1y},
              {0.0, 0.0},
              {0.0, 0.0},
          }};
          const auto hi = solve4(M, rhs);
          bl.ax = {a0x, a1x, 0.0, 0.0, hi[0][0], hi[1][0], hi[2][0], hi[3][0]};
          bl.ay = {a0y, a1y, 0.0, 0.0, hi[0][1], hi[1][1], hi[2][1], hi[3][1]};
          blends_.push_back(bl);
        }
        if (total_phase_ > path_length_ * (1.0 + 1e-9))
          bad("speed profile overruns the polyline length");
        double scale_min = 1.0;
        for (const Blend& bl : blends_)
          scale_min = std::min(scale_min,
                               min_param_scale(bl.s_begin, bl.s_begin + bl.span, 256));
        geometry_min_scale_ = scale_min;
        return;
      }
    }
  }

  // Minimum of |dX/ds| over [s_lo, s_hi]: grid scan plus golden-section
  // refinement around the best cell, with a small safety margin.
  double min_param_scale(double s_lo, double s_hi, int cells) const {
    auto speed_at = [this](double s) {
      const auto [xj, yj] = geometry(Jet3::variable(s));
      return std::hypot(xj.d1, yj.d1);
    };
    const double h = (s_hi - s_lo) / cells;
    double best_s = s_lo, best = speed_at(s_lo);
    for (int i = 1; i <= cells; ++i) {
      const double s = s_lo + i * h;
      const double v = speed_at(s);
      if (v < best) { best = v; best_s = s; }
    }
    double lo = std::max(s_lo, best_s - h), hi = std::min(s_hi, best_s + h);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - gr * (hi - lo), d = lo + gr * (hi - lo);
    double fc = speed_at(c), fd = speed_at(d);
    for (int it = 0; it < 80; ++it) {
      if (fc < fd) { hi = d; d = c; fd = fc; c = hi - gr * (hi - lo); fc = speed_at(c); }
      else         { lo = c; c = d; fc = fd; d = lo + gr * (hi - lo); fd = speed_at(d); }
    }
    return std::min(best, std::min(fc, fd)) * (1.0 - 1e-9);
  }

  TrajectorySpec spec_;
  double total_phase_ = 0.0;
  double profile_min_ = 0.0;
  double geometry_min_scale_ = 1.0;
  // polyline pieces
  std::vector<Vec2> seg_base_, seg_dir_;
  std::vector<double> segment_starts_;
  std::vector<Blend> blends_;
  double path_length_ = 0.0;
};

// Finite-difference derivative estimates for uniformly sampled positions:
// second-order central stencils inside, one-sided second-order stencils at
// the edges. The reference oracle for generators and for sampled-only paths.
struct FdSeries {
  std::vector<double> d1, d2, d3;
};

inline FdSeries fd_derivatives(std::span<const double> v, double h) {
  const std::size_t n = v.size();
  if (n < 7) throw std::invalid_argument("fd_derivatives: need at least 7 samples");
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("fd_derivatives: step must be positive");
  FdSeries out;
  out.d1.resize(n);
  out.d2.resize(n);
  out.d3.resize(n);
  const double h2 = h * h, h3 = h2 * h;
  for (std::size_t i = 0; i < n; ++i) {
    if (i >= 1 && i + 1 < n) {
      out.d1[i] = (v[i + 1] - v[i - 1]) / (2.0 * h);
      out.d2[i] = (v[i + 1] - 2.0 * v[i] + v[i - 1]) / h2;
    } else if (i == 0) {
      out.d1[i] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
      out.d2[i] = (2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / h2;
    } else {
      out.d1[i] = (3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h);
      out.d2[i] = (2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / h2;
    }
    if (i >= 2 && i + 2 < n) {
      out.d3[i] = (v[i + 2] - 2.0 * v[i + 1] + 2.0 * v[i - 1] - v[i - 2]) / (2.0 * h3);
    } else if (i < 2) {
      out.d3[i] = (-2.5 * v[i] + 9.0 * v[i + 1] - 12.0 * v[i + 2] + 7.0 * v[i + 3] -
                   1.5 * v[i + 4]) / h3;
    } else {
      out.d3[i] = (2.5 * v[i] - 9.0 * v[i - 1] + 12.0 * v[i - 2] - 7.0 * v[i - 3] +
                   1.5 * v[i - 4]) / h3;
    }
  }
  return out;
}

}  // namespace diffdrive
