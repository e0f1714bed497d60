#include "mrh/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

namespace mrh {

namespace {

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

// Sample value of one channel of one frame, as a signed integer.
std::int32_t read_pcm(const std::uint8_t* p, unsigned bits) {
  switch (bits) {
    case 8:
      return static_cast<std::int32_t>(p[0]) - 128;  // 8-bit PCM is unsigned
    case 16:
      return static_cast<std::int16_t>(read_u16(p));
    default: {  // 24
      std::int32_t v = static_cast<std::int32_t>(p[0]) | (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
      if (v & 0x800000) {
        v -= 0x1000000;  // sign-extend
      }
      return v;
    }
  }
}

double full_scale(unsigned bits) {
  switch (bits) {
    case 8:
      return 128.0;
    case 16:
      return 32768.0;
    default:
      return 8388608.0;
  }
}

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<std::uint8_t>((v >> shift) & 0xFF));
  }
}

}  // namespace

MusicSignal load_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(Errc::io_failure, "cannot open '" + path.string() + "'");
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    raise(Errc::malformed_wav, "'" + path.string() + "' is not a RIFF/WAVE file");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t sample_rate = 0;
  std::size_t data_offset = 0, data_size = 0;
  bool have_data = false;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint32_t chunk_size = read_u32(bytes.data() + pos + 4);
    const std::size_t body = pos + 8;
    if (body + chunk_size > bytes.size()) {
      raise(Errc::malformed_wav, "truncated chunk in '" + path.string() + "'");
    }
    if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0) {
      if (chunk_size < 16) {
        raise(Errc::malformed_wav, "fmt chunk too small in '" + path.string() + "'");
      }
      format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      sample_rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
      data_offset = body;
      data_size = chunk_size;
      have_data = true;
    }
    pos = body + chunk_size + (chunk_size & 1);  // chunks are word-aligned
  }

  if (!have_fmt || !have_data) {
    raise(Errc::malformed_wav, "missing fmt or data chunk in '" + path.string() + "'");
  }
  if (format != 1) {
    raise(Errc::non_pcm_wav,
          "'" + path.string() + "' uses format code " + std::to_string(format) +
              "; only integer PCM (1) is supported");
  }
  if (bits != 8 && bits != 16 && bits != 24) {
    raise(Errc::unsupported_wav,
          "unsupported bit depth " + std::to_string(bits) + " in '" + path.string() + "'");
  }
  if (channels != 1 && channels != 2) {
    raise(Errc::unsupported_wav,
          "unsupported channel count " + std::to_string(channels) + " in '" + path.string() + "'");
  }
  if (sample_rate == 0) {
    raise(Errc::malformed_wav, "zero sample rate in '" + path.string() + "'");
  }
  if (data_size == 0) {
    raise(Errc::empty_wav_data, "empty data chunk in '" + path.string() + "'");
  }

  const unsigned bytes_per_sample = bits / 8;
  const std::size_t frame_size = bytes_per_sample * channels;
  const std::size_t frames = data_size / frame_size;
  if (frames == 0) {
    raise(Errc::empty_wav_data, "data chunk holds no complete frame in '" + path.string() + "'");
  }

  MusicSignal sig;
  sig.id = path.stem().string();
  sig.sample_rate = sample_rate;
  sig.samples.resize(frames);
  const double scale = 1.0 / full_scale(bits);
  const std::uint8_t* p = bytes.data() + data_offset;
  for (std::size_t f = 0; f < frames; ++f, p += frame_size) {
    double v = read_pcm(p, bits);
    if (channels == 2) {
      v = (v + read_pcm(p + bytes_per_sample, bits)) * 0.5;
    }
    sig.samples[f] = static_cast<float>(v * scale);
  }
  return sig;
}

void save_wav(const std::filesystem::path& path, const MusicSignal& signal,
              unsigned bits_per_sample) {
  if (bits_per_sample != 8 && bits_per_sample != 16 && bits_per_sample != 24) {
    raise(Errc::invalid_argument, "save_wav supports 8, 16, or 24 bits per sample");
  }
  if (signal.samples.empty()) {
    raise(Errc::invalid_argument, "refusing to write a WAV with no samples");
  }

  const unsigned bytes_per_sample = bits_per_sample / 8;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(signal.samples.size() * bytes_per_sample);
  const double scale = full_scale(bits_per_sample);
  const double q_min = (bits_per_sample == 8) ? 0.0 : -scale;
  const double q_max = (bits_per_sample == 8) ? 255.0 : scale - 1.0;

  std::vector<std::uint8_t> out;
  out.reserve(44 + data_size + 1);
  out.insert(out.end(), {'R', 'I', 'F', 'F'});
  append_u32(out, 4 + 24 + 8 + data_size + (data_size & 1));
  out.insert(out.end(), {'W', 'A', 'V', 'E'});
  out.insert(out.end(), {'f', 'm', 't', ' '});
  append_u32(out, 16);
  append_u16(out, 1);  // integer PCM
  append_u16(out, 1);  // mono
  append_u32(out, signal.sample_rate);
  append_u32(out, signal.sample_rate * bytes_per_sample);
  append_u16(out, static_cast<std::uint16_t>(bytes_per_sample));
  append_u16(out, static_cast<std::uint16_t>(bits_per_sample));
  out.insert(out.end(), {'d', 'a', 't', 'a'});
  append_u32(out, data_size);

  for (float s : signal.samples) {
    double q = std::nearbyint(static_cast<double>(s) * scale);
    if (bits_per_sample == 8) {
      q += 128.0;
    }
    const auto v = static_cast<std::int32_t>(std::clamp(q, q_min, q_max));
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    if (bits_per_sample >= 16) {
      out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xFF));
    }
    if (bits_per_sample == 24) {
      out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xFF));
    }
  }
  if (data_size & 1) {
    out.push_back(0);  // pad to word boundary
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) {
    raise(Errc::io_failure, "cannot write '" + path.string() + "'");
  }
  f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!f) {
    raise(Errc::io_failure, "short write to '" + path.string() + "'");
  }
}

}  // namespace mrh
