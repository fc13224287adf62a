#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "skg/errors.hpp"

namespace skg {

enum class NodeId { Alice, Bob, Eve };

enum class Scenario { LoS, NLoS, Unlabeled };

inline const char* to_string(NodeId n) {
  switch (n) {
    case NodeId::Alice: return "alice";
    case NodeId::Bob: return "bob";
    case NodeId::Eve: return "eve";
  }
  return "?";
}

inline const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::LoS: return "los";
    case Scenario::NLoS: return "nlos";
    case Scenario::Unlabeled: return "unlabeled";
  }
  return "?";
}

inline NodeId node_from_string(const std::string& s) {
  if (s == "alice") return NodeId::Alice;
  if (s == "bob") return NodeId::Bob;
  if (s == "eve") return NodeId::Eve;
  throw FormatError("unknown node id '" + s + "'");
}

inline Scenario scenario_from_string(const std::string& s) {
  if (s == "los") return Scenario::LoS;
  if (s == "nlos") return Scenario::NLoS;
  if (s == "unlabeled") return Scenario::Unlabeled;
  throw FormatError("unknown scenario label '" + s + "'");
}

// One channel-magnitude time series as observed at a single node on a single
// (antenna, subcarrier) cell.  Samples are uniformly spaced in time.
struct MeasurementSeries {
  NodeId node_id = NodeId::Alice;
  int antenna_index = 0;
  int subcarrier_index = 0;
  std::vector<double> samples;
  double sample_period_s = 0.0;
  Scenario scenario = Scenario::Unlabeled;

  std::size_t size() const { return samples.size(); }
};

// Checks the structural invariants every downstream stage relies on:
// at least two samples, a positive sampling period, and finite values.
inline void validate(const MeasurementSeries& s) {
  if (s.samples.size() < 2)
    throw DataError("measurement series needs at least 2 samples, got " +
                    std::to_string(s.samples.size()));
  if (!(s.sample_period_s > 0.0))
    throw DataError("measurement series sample period must be positive");
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    if (!std::isfinite(s.samples[i]))
      throw DataError("non-finite sample at index " + std::to_string(i));
  }
}

// Splits an interleaved probe sequence into the two link directions.
// Odd-numbered probes (first, third, ...) are the downlink as seen by Bob,
// even-numbered ones the uplink as seen by Alice.  Both halves keep the
// original metadata with the sampling period doubled.
inline std::pair<MeasurementSeries, MeasurementSeries> split_updown(
    const MeasurementSeries& s) {
  if (s.samples.size() < 2)
    throw DataError("split_updown needs at least 2 samples, got " +
                    std::to_string(s.samples.size()));
  MeasurementSeries down = s, up = s;
  down.samples.clear();
  up.samples.clear();
  for (std::size_t i = 0; i < s.samples.size(); ++i) {
    ((i % 2 == 0) ? down : up).samples.push_back(s.samples[i]);
  }
  down.sample_period_s = s.sample_period_s * 2.0;
  up.sample_period_s = s.sample_period_s * 2.0;
  down.node_id = NodeId::Bob;
  up.node_id = NodeId::Alice;
  return {down, up};
}

}  // namespace skg
