#include "pickbench/sensing.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "pickbench/csv.hpp"
#include "pickbench/error.hpp"
#include "pickbench/rng.hpp"

namespace pickbench {

void DetectionThresholds::validate() const {
  for (double v : {force_abs, torque_abs, force_rate, torque_rate, rate_window}) {
    if (!(v > 0.0)) throw Error(ErrorCode::InvalidArgument, "detection thresholds must be > 0");
  }
}

int DetectionThresholds::window_ticks(double dt) const {
  return std::max(1, static_cast<int>(std::lround(rate_window / dt)));
}

void SensorModel::validate() const {
  if (!(noise_std_force >= 0.0) || !(noise_std_torque >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "sensor noise must be >= 0");
  }
  if (!bias.is_finite()) throw Error(ErrorCode::InvalidArgument, "sensor bias must be finite");
}

Wrench sensed_wrench(const Wrench& true_wrench, const SensorModel& model, std::uint64_t tick) {
  Wrench out = true_wrench + model.bias;
  if (model.noise_std_force == 0.0 && model.noise_std_torque == 0.0) return out;
  Rng rng(mix_seed(model.seed, tick));
  for (int i = 0; i < 3; ++i) out.force[i] += model.noise_std_force * rng.normal();
  for (int i = 0; i < 3; ++i) out.torque[i] += model.noise_std_torque * rng.normal();
  return out;
}

std::string_view to_string(TriggerKind kind) {
  switch (kind) {
    case TriggerKind::ForceAbs: return "ForceAbs";
    case TriggerKind::TorqueAbs: return "TorqueAbs";
    case TriggerKind::ForceRate: return "ForceRate";
    case TriggerKind::TorqueRate: return "TorqueRate";
  }
  return "?";
}

ContactDetector::ContactDetector(const DetectionThresholds& thresholds, double dt)
    : thresholds_(thresholds), dt_(dt), window_(thresholds.window_ticks(dt)) {
  thresholds_.validate();
  if (!(dt > 0.0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
}

std::optional<Trigger> ContactDetector::push(const WrenchSample& sample) {
  if (trigger_) return std::nullopt;
  const std::size_t i = force_mag_.size();
  force_mag_.push_back(sample.wrench.force.norm());
  torque_mag_.push_back(sample.wrench.torque.norm());

  std::optional<TriggerKind> kind;
  if (force_mag_[i] >= thresholds_.force_abs) {
    kind = TriggerKind::ForceAbs;
  } else if (torque_mag_[i] >= thresholds_.torque_abs) {
    kind = TriggerKind::TorqueAbs;
  } else if (i >= static_cast<std::size_t>(window_)) {
    const double span = window_ * dt_;
    const std::size_t j = i - window_;
    if ((force_mag_[i] - force_mag_[j]) / span >= thresholds_.force_rate) {
      kind = TriggerKind::ForceRate;
    } else if ((torque_mag_[i] - torque_mag_[j]) / span >= thresholds_.torque_rate) {
      kind = TriggerKind::TorqueRate;
    }
  }
  if (kind) trigger_ = Trigger{*kind, i, sample.time};
  return trigger_;
}

std::optional<Trigger> detect_contact(std::span<const WrenchSample> history,
                                      const DetectionThresholds& thresholds, double dt) {
  if (history.empty()) throw Error(ErrorCode::EmptyHistory, "wrench history is empty");
  ContactDetector detector(thresholds, dt);
  for (const auto& s : history) {
    if (auto t = detector.push(s)) return t;
  }
  return std::nullopt;
}

void write_wrench_csv(std::ostream& os, std::span<const WrenchSample> trace) {
  os << "time_s,fx,fy,fz,tx,ty,tz\n";
  for (const auto& s : trace) {
    os << csv::number(s.time);
    for (int i = 0; i < 3; ++i) os << ',' << csv::number(s.wrench.force[i]);
    for (int i = 0; i < 3; ++i) os << ',' << csv::number(s.wrench.torque[i]);
    os << '\n';
  }
}

std::vector<WrenchSample> read_wrench_csv(std::istream& is) {
  static const std::vector<std::string> header{"time_s", "fx", "fy", "fz", "tx", "ty", "tz"};
  const auto table = csv::read(is, header);
  std::vector<WrenchSample> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& f = table.rows[r];
    const auto line = table.line_numbers[r];
    WrenchSample s;
    s.time = csv::to_double(f[0], header[0], line);
    for (int i = 0; i < 3; ++i) s.wrench.force[i] = csv::to_double(f[1 + i], header[1 + i], line);
    for (int i = 0; i < 3; ++i) s.wrench.torque[i] = csv::to_double(f[4 + i], header[4 + i], line);
    out.push_back(s);
  }
  return out;
}

}  // namespace pickbench
