#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoverwing/log_schema.hpp"

namespace hoverwing {

/// Windows where pitch and airspeed hold still enough that an actuator
/// effectiveness can be treated as one constant.
struct SegmentCriteria {
  double window_s = 10.0;
  double max_theta_std_deg = 5.0;
  double max_speed_std = 1.0;
  double sample_hz = 500.0;
};

struct Segment {
  size_t begin = 0;  // record index, inclusive
  size_t end = 0;    // exclusive
  double mean_speed = 0.0;
  double mean_theta = 0.0;
  bool airspeed_valid = false;  // pitot in envelope through the window
};

std::vector<Segment> select_segments(const std::vector<LogRecord>& records,
                                     const SegmentCriteria& criteria);

/// Ordinary least squares with a chronological train/test split. Normal
/// equations when well conditioned, rank-revealing QR otherwise.
struct LinearFit {
  Eigen::VectorXd coeffs;
  double train_rms = 0.0;
  double test_rms = 0.0;
  bool ok = false;
  std::string warning;
};

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double train_fraction = 0.8);

enum class EffAxis { kPitchFlap, kYawFlap, kRollMotor, kThrustMotor };

struct EffectivenessFit {
  double value = 0.0;  // slope in controller units
  double rms = 0.0;
  double mean_speed = 0.0;
  bool airspeed_valid = false;
  bool ok = false;
  std::string warning;
};

/// Slope of changes in (filtered) response against changes in (filtered)
/// actuator input over one segment. diff_ticks sets the difference
/// horizon; the 5 Hz filtering makes single-tick differences useless.
EffectivenessFit fit_effectiveness(const std::vector<LogRecord>& records,
                                   const Segment& seg, EffAxis axis,
                                   int diff_ticks = 25);

/// value = a + b V^2 through per-segment points with measurable airspeed.
struct SpeedScheduleFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;
  bool ok = false;
  std::string warning;
};

SpeedScheduleFit fit_speed_schedule(
    const std::vector<EffectivenessFit>& points);

/// Sideslip observation models, all affine in a transformed lateral
/// specific force. The direct form needs no airspeed and is the one the
/// controller consumes.
struct SideslipModelFit {
  double c = 0.0;
  double b = 0.0;
  double train_rms = 0.0;
  double test_rms = 0.0;
  bool ok = false;
  std::string warning;
};

struct SideslipFits {
  SideslipModelFit over_v2;  // beta ~ c*f_y/V^2 + b
  SideslipModelFit direct;   // beta ~ c*f_y   + b
  SideslipModelFit over_v;   // beta ~ c*f_y/V + b
};

SideslipFits fit_sideslip(const std::vector<LogRecord>& records,
                          double min_speed = 6.0);

/// Body-X acceleration models with and without the flap columns; the
/// residual ratio shows whether flap deflection carries lift.
struct FlapLiftFits {
  LinearFit simple;      // [1, pitch rate, pitch]
  LinearFit with_flaps;  // [1, pitch rate, pitch, u_f left, u_f right]
  double g_flap = 0.0;   // m/s^2 per unit on the (-left + right) channel
};

FlapLiftFits fit_flap_lift(const std::vector<LogRecord>& records);

struct IdentificationResult {
  std::vector<Segment> segments;
  std::vector<EffectivenessFit> pitch_points;
  std::vector<EffectivenessFit> yaw_points;
  std::vector<EffectivenessFit> roll_points;
  std::vector<EffectivenessFit> thrust_points;
  SpeedScheduleFit pitch_schedule;
  SpeedScheduleFit yaw_schedule;
  SideslipFits sideslip;
  FlapLiftFits flap_lift;
};

IdentificationResult run_identification(const std::vector<LogRecord>& records,
                                        const SegmentCriteria& criteria);

/// Structured-text (JSON) report of every fit.
std::string identification_report(const IdentificationResult& r);

}  // namespace hoverwing
