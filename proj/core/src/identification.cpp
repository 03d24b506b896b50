#include "hoverwing/identification.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "hoverwing/frames.hpp"

namespace hoverwing {

namespace {

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double stddev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / v.size());
}

}  // namespace

std::vector<Segment> select_segments(const std::vector<LogRecord>& records,
                                     const SegmentCriteria& criteria) {
  std::vector<Segment> out;
  const size_t win =
      static_cast<size_t>(criteria.window_s * criteria.sample_hz);
  if (win < 2 || records.size() < win) return out;

  for (size_t begin = 0; begin + win <= records.size(); begin += win) {
    std::vector<double> theta, speed;
    theta.reserve(win);
    speed.reserve(win);
    size_t valid = 0;
    for (size_t i = begin; i < begin + win; ++i) {
      theta.push_back(records[i].theta);
      speed.push_back(records[i].airspeed);
      if (records[i].airspeed_valid != 0.0) ++valid;
    }
    const double theta_std_deg = stddev(theta) * 180.0 / M_PI;
    if (theta_std_deg > criteria.max_theta_std_deg) continue;
    if (stddev(speed) > criteria.max_speed_std) continue;

    Segment seg;
    seg.begin = begin;
    seg.end = begin + win;
    seg.mean_theta = mean(theta);
    seg.mean_speed = mean(speed);
    seg.airspeed_valid = valid == win;
    out.push_back(seg);
  }
  return out;
}

LinearFit fit_linear(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                     double train_fraction) {
  LinearFit fit;
  const Eigen::Index n = X.rows(), k = X.cols();
  if (n < k || n != y.rows()) {
    fit.warning = "not enough samples";
    return fit;
  }
  Eigen::Index n_train =
      static_cast<Eigen::Index>(std::floor(train_fraction * n));
  n_train = std::clamp<Eigen::Index>(n_train, k, n);

  const auto Xt = X.topRows(n_train);
  const auto yt = y.head(n_train);

  const Eigen::MatrixXd gram = Xt.transpose() * Xt;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
  const double emin = es.eigenvalues().minCoeff();
  const double emax = es.eigenvalues().maxCoeff();

  if (emax <= 0.0) {
    fit.warning = "insufficient excitation";
    return fit;
  }
  if (emin > emax * 1e-10) {
    fit.coeffs = gram.ldlt().solve(Xt.transpose() * yt);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xt);
    if (qr.rank() < k) {
      fit.warning = "insufficient excitation";
      fit.coeffs = qr.solve(yt);  // minimum-norm-ish, reported but not ok
      return fit;
    }
    fit.coeffs = qr.solve(yt);
  }

  fit.train_rms = std::sqrt((Xt * fit.coeffs - yt).squaredNorm() /
                            static_cast<double>(n_train));
  if (n_train < n) {
    const auto Xv = X.bottomRows(n - n_train);
    const auto yv = y.tail(n - n_train);
    fit.test_rms = std::sqrt((Xv * fit.coeffs - yv).squaredNorm() /
                             static_cast<double>(n - n_train));
  } else {
    fit.test_rms = fit.train_rms;
  }
  fit.ok = true;
  return fit;
}

EffectivenessFit fit_effectiveness(const std::vector<LogRecord>& records,
                                   const Segment& seg, EffAxis axis,
                                   int diff_ticks) {
  EffectivenessFit out;
  out.mean_speed = seg.mean_speed;
  out.airspeed_valid = seg.airspeed_valid;

  const size_t step = static_cast<size_t>(std::max(diff_ticks, 1));
  if (seg.end > records.size() || seg.begin + step >= seg.end) {
    out.warning = "segment too short";
    return out;
  }

  auto input = [&](const LogRecord& r) {
    switch (axis) {
      case EffAxis::kPitchFlap:
        return r.u_est_0 - r.u_est_1;
      case EffAxis::kYawFlap:
        return r.u_est_0 + r.u_est_1;
      case EffAxis::kRollMotor:
        // The quadratic thrust law differenced exactly: the model slope
        // sits on (u4^2 - u3^2)/2.
        return 0.5 * (r.u_est_3 * r.u_est_3 - r.u_est_2 * r.u_est_2);
      case EffAxis::kThrustMotor:
        return r.u_est_2 + r.u_est_3;
    }
    return 0.0;
  };
  auto response = [&](const LogRecord& r) {
    switch (axis) {
      case EffAxis::kPitchFlap:
        return r.omega_dot_f_q;
      case EffAxis::kYawFlap:
        return r.omega_dot_f_r;
      case EffAxis::kRollMotor:
        return r.omega_dot_f_p;
      case EffAxis::kThrustMotor:
        return r.t_spec_f;
    }
    return 0.0;
  };

  const size_t n = seg.end - seg.begin - step;
  Eigen::MatrixXd X(n, 1);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    const LogRecord& a = records[seg.begin + i];
    const LogRecord& b = records[seg.begin + i + step];
    X(i, 0) = input(b) - input(a);
    y(i) = response(b) - response(a);
  }

  if (X.col(0).norm() < 1e-9 * std::sqrt(static_cast<double>(n))) {
    out.warning = "insufficient excitation";
    return out;
  }

  const LinearFit fit = fit_linear(X, y, 1.0);
  if (!fit.ok) {
    out.warning = fit.warning;
    return out;
  }
  out.value = fit.coeffs(0);
  out.rms = fit.train_rms;
  out.ok = true;
  return out;
}

SpeedScheduleFit fit_speed_schedule(
    const std::vector<EffectivenessFit>& points) {
  SpeedScheduleFit out;
  std::vector<const EffectivenessFit*> used;
  for (const auto& p : points) {
    if (p.ok && p.airspeed_valid) used.push_back(&p);
  }
  if (used.size() < 2) {
    out.warning = "need at least two segments with measurable airspeed";
    return out;
  }
  Eigen::MatrixXd X(used.size(), 2);
  Eigen::VectorXd y(used.size());
  for (size_t i = 0; i < used.size(); ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = used[i]->mean_speed * used[i]->mean_speed;
    y(i) = used[i]->value;
  }
  const LinearFit fit = fit_linear(X, y, 1.0);
  if (!fit.ok) {
    out.warning = fit.warning;
    return out;
  }
  out.a = fit.coeffs(0);
  out.b = fit.coeffs(1);
  out.rms = fit.train_rms;
  out.ok = true;
  return out;
}

namespace {

/// Sideslip truth from the kinematic state and the logged wind.
double beta_from_record(const LogRecord& r) {
  const Quat q{r.qw, r.qx, r.qy, r.qz};
  const Vec3 v_rel_n(r.vel_n - r.wind_n, r.vel_e - r.wind_e,
                     r.vel_d - r.wind_d);
  const Vec3 v_b = q.to_rotmat().transpose() * v_rel_n;
  return std::atan2(v_b(1), std::hypot(v_b(0), v_b(2)));
}

SideslipModelFit to_model_fit(const LinearFit& f) {
  SideslipModelFit m;
  m.ok = f.ok;
  m.warning = f.warning;
  if (f.coeffs.size() == 2) {
    m.c = f.coeffs(0);
    m.b = f.coeffs(1);
  }
  m.train_rms = f.train_rms;
  m.test_rms = f.test_rms;
  return m;
}

}  // namespace

SideslipFits fit_sideslip(const std::vector<LogRecord>& records,
                          double min_speed) {
  std::vector<size_t> rows;
  for (size_t i = 0; i < records.size(); ++i) {
    if (records[i].airspeed_valid != 0.0 && records[i].airspeed >= min_speed) {
      rows.push_back(i);
    }
  }
  SideslipFits out;
  if (rows.size() < 8) {
    out.direct.warning = "not enough forward-flight data";
    out.over_v.warning = out.direct.warning;
    out.over_v2.warning = out.direct.warning;
    return out;
  }

  const size_t n = rows.size();
  Eigen::VectorXd beta(n), fy(n), v(n);
  for (size_t i = 0; i < n; ++i) {
    const LogRecord& r = records[rows[i]];
    beta(i) = beta_from_record(r);
    fy(i) = r.f_y_f;
    v(i) = r.airspeed;
  }

  Eigen::MatrixXd X(n, 2);
  X.col(1).setOnes();

  X.col(0) = fy.array() / (v.array() * v.array());
  out.over_v2 = to_model_fit(fit_linear(X, beta));
  X.col(0) = fy;
  out.direct = to_model_fit(fit_linear(X, beta));
  X.col(0) = fy.array() / v.array();
  out.over_v = to_model_fit(fit_linear(X, beta));
  return out;
}

FlapLiftFits fit_flap_lift(const std::vector<LogRecord>& records) {
  FlapLiftFits out;
  const size_t n = records.size();
  if (n < 16) {
    out.simple.warning = "not enough data";
    out.with_flaps.warning = out.simple.warning;
    return out;
  }
  Eigen::MatrixXd X(n, 5);
  Eigen::VectorXd y(n);
  for (size_t i = 0; i < n; ++i) {
    const LogRecord& r = records[i];
    X(i, 0) = 1.0;
    X(i, 1) = r.gyro_q;
    X(i, 2) = r.theta;
    X(i, 3) = r.u_est_0;
    X(i, 4) = r.u_est_1;
    y(i) = r.f_x;
  }
  out.simple = fit_linear(X.leftCols(3), y);
  out.with_flaps = fit_linear(X, y);
  if (out.with_flaps.ok && out.with_flaps.coeffs.size() == 5) {
    out.g_flap = 0.5 * (out.with_flaps.coeffs(4) - out.with_flaps.coeffs(3));
  }
  return out;
}

IdentificationResult run_identification(const std::vector<LogRecord>& records,
                                        const SegmentCriteria& criteria) {
  IdentificationResult r;
  r.segments = select_segments(records, criteria);
  for (const auto& seg : r.segments) {
    r.pitch_points.push_back(
        fit_effectiveness(records, seg, EffAxis::kPitchFlap));
    r.yaw_points.push_back(fit_effectiveness(records, seg, EffAxis::kYawFlap));
    r.roll_points.push_back(
        fit_effectiveness(records, seg, EffAxis::kRollMotor));
    r.thrust_points.push_back(
        fit_effectiveness(records, seg, EffAxis::kThrustMotor));
  }
  r.pitch_schedule = fit_speed_schedule(r.pitch_points);
  r.yaw_schedule = fit_speed_schedule(r.yaw_points);
  r.sideslip = fit_sideslip(records);
  r.flap_lift = fit_flap_lift(records);
  return r;
}

namespace {

nlohmann::json eff_points_json(const std::vector<EffectivenessFit>& pts) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : pts) {
    arr.push_back({{"value", p.value},
                   {"rms", p.rms},
                   {"mean_speed", p.mean_speed},
                   {"airspeed_valid", p.airspeed_valid},
                   {"ok", p.ok},
                   {"warning", p.warning}});
  }
  return arr;
}

nlohmann::json schedule_json(const SpeedScheduleFit& s) {
  return {{"a", s.a}, {"b", s.b}, {"rms", s.rms}, {"ok", s.ok},
          {"warning", s.warning}};
}

nlohmann::json sideslip_json(const SideslipModelFit& m) {
  return {{"c", m.c},
          {"b", m.b},
          {"train_rms", m.train_rms},
          {"test_rms", m.test_rms},
          {"ok", m.ok},
          {"warning", m.warning}};
}

nlohmann::json linear_json(const LinearFit& f) {
  nlohmann::json coeffs = nlohmann::json::array();
  for (Eigen::Index i = 0; i < f.coeffs.size(); ++i)
    coeffs.push_back(f.coeffs(i));
  return {{"coeffs", coeffs},
          {"train_rms", f.train_rms},
          {"test_rms", f.test_rms},
          {"ok", f.ok},
          {"warning", f.warning}};
}

}  // namespace

std::string identification_report(const IdentificationResult& r) {
  nlohmann::json j;
  j["schema"] = 1;
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : r.segments) {
    segs.push_back({{"begin", s.begin},
                    {"end", s.end},
                    {"mean_speed", s.mean_speed},
                    {"mean_theta", s.mean_theta},
                    {"airspeed_valid", s.airspeed_valid}});
  }
  j["segments"] = segs;
  j["pitch_points"] = eff_points_json(r.pitch_points);
  j["yaw_points"] = eff_points_json(r.yaw_points);
  j["roll_points"] = eff_points_json(r.roll_points);
  j["thrust_points"] = eff_points_json(r.thrust_points);
  j["pitch_schedule"] = schedule_json(r.pitch_schedule);
  j["yaw_schedule"] = schedule_json(r.yaw_schedule);
  j["sideslip"] = {{"over_v2", sideslip_json(r.sideslip.over_v2)},
                   {"direct", sideslip_json(r.sideslip.direct)},
                   {"over_v", sideslip_json(r.sideslip.over_v)}};
  j["flap_lift"] = {{"simple", linear_json(r.flap_lift.simple)},
                    {"with_flaps", linear_json(r.flap_lift.with_flaps)},
                    {"g_flap", r.flap_lift.g_flap}};
  return j.dump(2) + "\n";
}

}  // namespace hoverwing
