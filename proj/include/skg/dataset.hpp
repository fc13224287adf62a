#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skg/errors.hpp"
#include "skg/series.hpp"

namespace skg {

// Measurement container ("SKG1"): a JSON header describing the block,
// followed by raw little-endian float32 samples in (time, antenna,
// subcarrier) row-major order.
//
//   offset 0 : magic "SKG1"
//   offset 4 : header length (uint32, little endian)
//   offset 8 : header JSON (UTF-8), exactly header-length bytes
//   then     : time * antennas * subcarriers float32 values
//
// Header fields: time, antennas, subcarriers, sample_period_s, node,
// scenario, endianness (must be "little").

struct DatasetInfo {
  std::size_t time = 0;
  std::size_t antennas = 0;
  std::size_t subcarriers = 0;
  double sample_period_s = 0.0;
  NodeId node = NodeId::Alice;
  Scenario scenario = Scenario::Unlabeled;
};

struct SubsampleSpec {
  std::size_t antenna_stride = 4;
  std::size_t subcarrier_stride = 10;
  std::size_t time_stride = 5;
};

namespace detail {

inline bool host_is_little_endian() {
  const std::uint16_t probe = 1;
  std::uint8_t first;
  std::memcpy(&first, &probe, 1);
  return first == 1;
}

inline float f32_from_le(const std::uint8_t* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                       (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) |
                       (static_cast<std::uint32_t>(p[3]) << 24);
  float f;
  std::memcpy(&f, &bits, sizeof(f));
  return f;
}

inline void f32_to_le(float f, std::uint8_t* p) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  p[0] = static_cast<std::uint8_t>(bits & 0xFF);
  p[1] = static_cast<std::uint8_t>((bits >> 8) & 0xFF);
  p[2] = static_cast<std::uint8_t>((bits >> 16) & 0xFF);
  p[3] = static_cast<std::uint8_t>((bits >> 24) & 0xFF);
}

}  // namespace detail

inline void write_dataset(const std::string& path, const DatasetInfo& info,
                          std::span<const float> payload) {
  const std::size_t expect = info.time * info.antennas * info.subcarriers;
  if (payload.size() != expect)
    throw DataError("dataset payload has " + std::to_string(payload.size()) +
                    " values, dimensions require " + std::to_string(expect));
  if (!(info.sample_period_s > 0.0))
    throw DataError("dataset sample period must be positive");

  nlohmann::json header;
  header["time"] = info.time;
  header["antennas"] = info.antennas;
  header["subcarriers"] = info.subcarriers;
  header["sample_period_s"] = info.sample_period_s;
  header["node"] = to_string(info.node);
  header["scenario"] = to_string(info.scenario);
  header["endianness"] = "little";
  const std::string htext = header.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out.write("SKG1", 4);
  const std::uint32_t hlen = static_cast<std::uint32_t>(htext.size());
  const std::uint8_t hl[4] = {
      static_cast<std::uint8_t>(hlen & 0xFF),
      static_cast<std::uint8_t>((hlen >> 8) & 0xFF),
      static_cast<std::uint8_t>((hlen >> 16) & 0xFF),
      static_cast<std::uint8_t>((hlen >> 24) & 0xFF)};
  out.write(reinterpret_cast<const char*>(hl), 4);
  out.write(htext.data(), static_cast<std::streamsize>(htext.size()));
  std::vector<std::uint8_t> buf(payload.size() * 4);
  for (std::size_t i = 0; i < payload.size(); ++i)
    detail::f32_to_le(payload[i], buf.data() + 4 * i);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline std::pair<DatasetInfo, std::vector<float>> read_dataset(
    const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> raw((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
  if (raw.size() < 8 || std::memcmp(raw.data(), "SKG1", 4) != 0)
    throw FormatError("'" + path + "' is not a measurement container");
  const std::uint32_t hlen = static_cast<std::uint32_t>(raw[4]) |
                             (static_cast<std::uint32_t>(raw[5]) << 8) |
                             (static_cast<std::uint32_t>(raw[6]) << 16) |
                             (static_cast<std::uint32_t>(raw[7]) << 24);
  if (raw.size() < 8u + hlen)
    throw FormatError("container header is truncated");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(raw.begin() + 8, raw.begin() + 8 + hlen);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("container header is not valid JSON: ") +
                      e.what());
  }
  DatasetInfo info;
  try {
    info.time = header.at("time").get<std::size_t>();
    info.antennas = header.at("antennas").get<std::size_t>();
    info.subcarriers = header.at("subcarriers").get<std::size_t>();
    info.sample_period_s = header.at("sample_period_s").get<double>();
    info.node = node_from_string(header.at("node").get<std::string>());
    info.scenario =
        scenario_from_string(header.at("scenario").get<std::string>());
    if (header.at("endianness").get<std::string>() != "little")
      throw FormatError("container declares unsupported endianness");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("container header field error: ") +
                      e.what());
  }
  if (info.time == 0 || info.antennas == 0 || info.subcarriers == 0)
    throw FormatError("container dimensions must all be positive");
  if (!(info.sample_period_s > 0.0))
    throw FormatError("container sample period must be positive");

  const std::size_t count = info.time * info.antennas * info.subcarriers;
  if (raw.size() != 8u + hlen + count * 4)
    throw FormatError("container payload has wrong size: expected " +
                      std::to_string(count * 4) + " bytes, found " +
                      std::to_string(raw.size() - 8 - hlen));
  std::vector<float> payload(count);
  for (std::size_t i = 0; i < count; ++i)
    payload[i] = detail::f32_from_le(raw.data() + 8 + hlen + 4 * i);
  return {info, std::move(payload)};
}

// Loads a container and applies the configured subsampling: every
// antenna_stride-th antenna, every subcarrier_stride-th subcarrier, every
// time_stride-th sample, all starting from index 0.  One series per retained
// (antenna, subcarrier) pair; the output period is the stored period times
// time_stride.
inline std::vector<MeasurementSeries> load_dataset(const std::string& path,
                                                   const SubsampleSpec& spec) {
  if (spec.antenna_stride < 1 || spec.subcarrier_stride < 1 ||
      spec.time_stride < 1)
    throw ConfigError("subsample strides must all be >= 1");
  auto [info, payload] = read_dataset(path);
  // A stride beyond a dimension simply keeps that dimension's first index;
  // index 0 is always retained, so every valid container yields data.
  std::vector<MeasurementSeries> out;
  for (std::size_t a = 0; a < info.antennas; a += spec.antenna_stride) {
    for (std::size_t c = 0; c < info.subcarriers; c += spec.subcarrier_stride) {
      MeasurementSeries s;
      s.node_id = info.node;
      s.antenna_index = static_cast<int>(a);
      s.subcarrier_index = static_cast<int>(c);
      s.sample_period_s =
          info.sample_period_s * static_cast<double>(spec.time_stride);
      s.scenario = info.scenario;
      for (std::size_t t = 0; t < info.time; t += spec.time_stride) {
        const std::size_t off =
            (t * info.antennas + a) * info.subcarriers + c;
        const double v = static_cast<double>(payload[off]);
        if (!std::isfinite(v))
          throw DataError("non-finite sample at payload offset " +
                          std::to_string(off));
        s.samples.push_back(v);
      }
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace skg
