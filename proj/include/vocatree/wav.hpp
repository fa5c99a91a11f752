#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "vocatree/common.hpp"

namespace vocatree {

// ---------------------------------------------------------------------------
// Mono PCM audio. Integer samples are scaled to [-1, 1] by 2^(bits-1).
// ---------------------------------------------------------------------------

struct AudioClip {
  std::vector<double> samples;
  int sample_rate_hz = 0;
  int bit_depth_source = 16;

  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

namespace detail {

inline std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

inline std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

/// Reads a RIFF/WAVE file: PCM, mono, 16- or 24-bit little-endian.
inline AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("load_wav: cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw CorruptFileError("load_wav: not a RIFF/WAVE file: " + path);

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::size_t data_offset = 0, data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    const std::uint32_t chunk_size = detail::read_u32le(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size())
      throw CorruptFileError("load_wav: truncated chunk in " + path);
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (chunk_size < 16)
        throw CorruptFileError("load_wav: fmt chunk too small in " + path);
      format = detail::read_u16le(bytes.data() + body);
      channels = detail::read_u16le(bytes.data() + body + 2);
      sample_rate = detail::read_u32le(bytes.data() + body + 4);
      bits = detail::read_u16le(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }
  if (!have_fmt || data_offset == 0)
    throw CorruptFileError("load_wav: missing fmt or data chunk in " + path);
  if (format != 1)
    throw UnsupportedFormatError("load_wav: non-PCM format in " + path);
  if (channels != 1)
    throw UnsupportedFormatError("load_wav: only mono is supported: " + path);
  if (bits != 16 && bits != 24)
    throw UnsupportedFormatError("load_wav: unsupported bit depth " +
                                 std::to_string(bits) + " in " + path);
  const std::size_t bytes_per_sample = bits / 8;
  if (data_size % bytes_per_sample != 0)
    throw CorruptFileError("load_wav: data size not a sample multiple in " + path);

  AudioClip clip;
  clip.sample_rate_hz = static_cast<int>(sample_rate);
  clip.bit_depth_source = bits;
  const std::size_t n = data_size / bytes_per_sample;
  clip.samples.resize(n);
  const unsigned char* p = bytes.data() + data_offset;
  if (bits == 16) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::int16_t v =
          static_cast<std::int16_t>(p[2 * i] | (p[2 * i + 1] << 8));
      clip.samples[i] = static_cast<double>(v) / 32768.0;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      std::int32_t v = static_cast<std::int32_t>(p[3 * i]) |
                       (static_cast<std::int32_t>(p[3 * i + 1]) << 8) |
                       (static_cast<std::int32_t>(p[3 * i + 2]) << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign-extend
      clip.samples[i] = static_cast<double>(v) / 8388608.0;
    }
  }
  return clip;
}

/// Writes a 16-bit PCM mono WAV. Samples are scaled by 2^15, rounded to
/// nearest and clamped, so a clip read from a 16-bit file round-trips to
/// the original integers.
inline void write_wav_16(const std::string& path, const AudioClip& clip) {
  if (clip.samples.empty() || clip.sample_rate_hz <= 0)
    throw ValidationError("write_wav_16: empty clip or bad sample rate");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_wav_16: cannot open " + path + " for writing");

  const std::uint32_t data_size =
      static_cast<std::uint32_t>(clip.samples.size() * 2);
  auto put_u32 = [&](std::uint32_t v) {
    const char b[4] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                       static_cast<char>((v >> 16) & 0xFF),
                       static_cast<char>((v >> 24) & 0xFF)};
    out.write(b, 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF)};
    out.write(b, 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_size);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // PCM
  put_u16(1);  // mono
  put_u32(static_cast<std::uint32_t>(clip.sample_rate_hz));
  put_u32(static_cast<std::uint32_t>(clip.sample_rate_hz) * 2);
  put_u16(2);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_size);
  for (const double s : clip.samples) {
    long v = std::lround(s * 32768.0);
    if (v > 32767) v = 32767;
    if (v < -32768) v = -32768;
    put_u16(static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  }
  if (!out) throw IoError("write_wav_16: write failed for " + path);
}

}  // namespace vocatree
