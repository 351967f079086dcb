#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eprsim/errors.hpp"
#include "eprsim/spectral.hpp"

namespace eprsim {

enum class FrameKind { Signal, Shot };

inline const char* to_string(FrameKind k) {
  return k == FrameKind::Signal ? "signal" : "shot";
}

/// Seeded multi-channel quadrature traces: n_frames independent acquisitions
/// of n_points samples on n_channels channels. Samples are real, in units of
/// sqrt(shot variance); layout is frame-major, then channel, then point.
struct FrameSet {
  FrameKind kind = FrameKind::Signal;
  QuadConfig config = QuadConfig::X;
  std::uint64_t seed = 0;
  double fs_hz = 0.0;
  int n_frames = 0;
  int n_points = 0;
  int n_channels = 2;
  std::vector<double> data;

  std::size_t frame_stride() const {
    return static_cast<std::size_t>(n_channels) * n_points;
  }

  std::span<double> channel(int frame, int ch) {
    return {data.data() + frame * frame_stride() + static_cast<std::size_t>(ch) * n_points,
            static_cast<std::size_t>(n_points)};
  }
  std::span<const double> channel(int frame, int ch) const {
    return {data.data() + frame * frame_stride() + static_cast<std::size_t>(ch) * n_points,
            static_cast<std::size_t>(n_points)};
  }

  void validate() const {
    if (n_points < 2) throw ModelError("FrameSet: n_points must be >= 2");
    if (!(fs_hz > 0.0)) throw ModelError("FrameSet: fs must be positive");
    if (n_frames < 1) throw ModelError("FrameSet: n_frames must be >= 1");
    if (n_channels != 2) throw ModelError("FrameSet: expected 2 channels");
    if (data.size() != static_cast<std::size_t>(n_frames) * frame_stride())
      throw ModelError("FrameSet: data length does not match dimensions");
    for (double v : data)
      if (!std::isfinite(v)) throw ModelError("FrameSet: non-finite sample");
  }
};

namespace detail {

static_assert(std::endian::native == std::endian::little,
              "frame container I/O assumes a little-endian host");

inline constexpr char kFrameMagic[8] = {'E', 'P', 'R', 'F', 'R', 'A', 'M', 'E'};

}  // namespace detail

/// Binary container: 8-byte magic, little-endian u32 header length, JSON
/// header, then little-endian f64 samples (frame, channel, point order).
inline void write_frames(const FrameSet& frames, const std::string& path) {
  frames.validate();
  nlohmann::ordered_json header;
  header["version"] = 1;
  header["kind"] = to_string(frames.kind);
  header["quadrature_config"] = to_string(frames.config);
  header["seed"] = frames.seed;
  header["fs_hz"] = frames.fs_hz;
  header["n_frames"] = frames.n_frames;
  header["n_points"] = frames.n_points;
  header["n_channels"] = frames.n_channels;
  header["units"] = "sqrt_shot";
  const std::string head = header.dump();

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_frames: cannot open " + path);
  out.write(detail::kFrameMagic, sizeof(detail::kFrameMagic));
  const std::uint32_t len = static_cast<std::uint32_t>(head.size());
  out.write(reinterpret_cast<const char*>(&len), sizeof(len));
  out.write(head.data(), static_cast<std::streamsize>(head.size()));
  out.write(reinterpret_cast<const char*>(frames.data.data()),
            static_cast<std::streamsize>(frames.data.size() * sizeof(double)));
  if (!out) throw IoError("write_frames: short write to " + path);
}

inline FrameSet read_frames(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_frames: cannot open " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, detail::kFrameMagic, sizeof(magic)) != 0)
    throw IoError("read_frames: " + path + " is not a frame container");
  std::uint32_t len = 0;
  in.read(reinterpret_cast<char*>(&len), sizeof(len));
  if (!in) throw IoError("read_frames: truncated header in " + path);
  std::string head(len, '\0');
  in.read(head.data(), len);
  if (!in) throw IoError("read_frames: truncated header in " + path);

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(head);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("read_frames: bad header in " + path + ": " + e.what());
  }

  FrameSet frames;
  try {
    frames.kind = header.at("kind").get<std::string>() == "shot" ? FrameKind::Shot
                                                                 : FrameKind::Signal;
    frames.config = header.at("quadrature_config").get<std::string>() == "p"
                        ? QuadConfig::P
                        : QuadConfig::X;
    frames.seed = header.at("seed").get<std::uint64_t>();
    frames.fs_hz = header.at("fs_hz").get<double>();
    frames.n_frames = header.at("n_frames").get<int>();
    frames.n_points = header.at("n_points").get<int>();
    frames.n_channels = header.at("n_channels").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("read_frames: incomplete header in " + path + ": " + e.what());
  }
  if (frames.n_frames < 1 || frames.n_points < 2 || frames.n_channels != 2)
    throw IoError("read_frames: invalid dimensions in " + path);

  const std::size_t count =
      static_cast<std::size_t>(frames.n_frames) * frames.frame_stride();
  frames.data.resize(count);
  in.read(reinterpret_cast<char*>(frames.data.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (!in || static_cast<std::size_t>(in.gcount()) != count * sizeof(double))
    throw IoError("read_frames: truncated payload in " + path);
  frames.validate();
  return frames;
}

/// One frame as CSV for plotting: time column then one column per channel.
inline void export_frame_csv(const FrameSet& frames, int frame, const std::string& path) {
  if (frame < 0 || frame >= frames.n_frames)
    throw std::invalid_argument("export_frame_csv: frame index out of range");
  std::ofstream out(path);
  if (!out) throw IoError("export_frame_csv: cannot open " + path);
  out << "t_s";
  for (int c = 0; c < frames.n_channels; ++c) out << ",ch" << (c + 1);
  out << "\n";
  char buf[64];
  for (int n = 0; n < frames.n_points; ++n) {
    std::snprintf(buf, sizeof(buf), "%.9e", n / frames.fs_hz);
    out << buf;
    for (int c = 0; c < frames.n_channels; ++c) {
      std::snprintf(buf, sizeof(buf), "%.12g", frames.channel(frame, c)[n]);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) throw IoError("export_frame_csv: short write to " + path);
}

}  // namespace eprsim
