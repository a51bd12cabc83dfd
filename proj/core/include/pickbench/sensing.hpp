#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pickbench/geometry.hpp"

namespace pickbench {

/// Contact thresholds on the wrist force/torque magnitudes and on their time
/// derivatives. Rates are per second, measured as a backward difference over
/// `rate_window` seconds.
struct DetectionThresholds {
  double force_abs = 5.0;     // N
  double torque_abs = 1.0;    // N m
  double force_rate = 3.0;    // N/s
  double torque_rate = 0.3;   // N m / s
  double rate_window = 0.1;   // s

  void validate() const;
  /// Backward-difference baseline in samples for a given tick.
  int window_ticks(double dt) const;
};

struct SensorModel {
  double noise_std_force = 0.05;
  double noise_std_torque = 0.005;
  Wrench bias;
  std::uint64_t seed = 0;

  void validate() const;
};

/// True wrench + bias + zero-mean Gaussian noise drawn from (seed, tick).
Wrench sensed_wrench(const Wrench& true_wrench, const SensorModel& model, std::uint64_t tick);

enum class TriggerKind { ForceAbs, TorqueAbs, ForceRate, TorqueRate };

std::string_view to_string(TriggerKind kind);

struct WrenchSample {
  double time = 0.0;
  Wrench wrench;
};

struct Trigger {
  TriggerKind kind;
  std::size_t index;
  double time;
};

/// Streaming form of detect_contact; both share this implementation.
class ContactDetector {
 public:
  ContactDetector(const DetectionThresholds& thresholds, double dt);

  /// Feeds the next sample; returns the trigger once, on the first sample
  /// that crosses any threshold.
  std::optional<Trigger> push(const WrenchSample& sample);
  std::optional<Trigger> trigger() const { return trigger_; }

 private:
  DetectionThresholds thresholds_;
  double dt_;
  int window_;
  std::vector<double> force_mag_;
  std::vector<double> torque_mag_;
  std::optional<Trigger> trigger_;
};

/// Earliest threshold crossing in a uniformly sampled history. Ties on the
/// same sample resolve in TriggerKind order.
std::optional<Trigger> detect_contact(std::span<const WrenchSample> history,
                                      const DetectionThresholds& thresholds, double dt);

/// CSV columns: time_s,fx,fy,fz,tx,ty,tz
void write_wrench_csv(std::ostream& os, std::span<const WrenchSample> trace);
std::vector<WrenchSample> read_wrench_csv(std::istream& is);

}  // namespace pickbench
