#ifndef ANGEMB_FRAMES_HPP
#define ANGEMB_FRAMES_HPP

/**
 * @file frames.hpp
 * @brief Grayscale frame stacks and the binary PGM (P5, maxval 255) codec.
 *
 * Each frame becomes one column of a (width*height) x n matrix; pixel (r, c)
 * lands in row r*width + c.
 */

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <fnmatch.h>

#include "angemb/linalg.hpp"

namespace angemb {

struct FrameStack {
  Index width = 0;
  Index height = 0;
  Eigen::MatrixXd frames;  // (width*height) x n
  std::vector<std::string> names;

  Index n() const { return frames.cols(); }
  Index pixels() const { return width * height; }
};

struct PgmImage {
  Index width = 0;
  Index height = 0;
  std::vector<unsigned char> pixels;  // row-major
};

namespace detail {

class PgmHeaderReader {
 public:
  explicit PgmHeaderReader(const std::string& bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }

  long next_int(const std::string& what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && std::isdigit(static_cast<unsigned char>(bytes_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 9) throw Error(ErrorCode::InvalidData, "PGM header: bad " + what);
    return std::stol(bytes_.substr(start, pos_ - start));
  }

  // Exactly one whitespace byte separates maxval from the raster.
  void single_space() {
    if (pos_ >= bytes_.size() || !std::isspace(static_cast<unsigned char>(bytes_[pos_]))) {
      throw Error(ErrorCode::InvalidData, "PGM header: missing separator before raster");
    }
    ++pos_;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const char c = bytes_[pos_];
      if (c == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& bytes_;
  std::size_t pos_ = 2;
};

}  // namespace detail

inline PgmImage decode_pgm(const std::string& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') throw Error(ErrorCode::UnsupportedFormat, "not a PNM file");
  switch (bytes[1]) {
    case '5': break;
    case '3':
    case '6': throw Error(ErrorCode::UnsupportedFormat, "color PPM input is not supported");
    default: throw Error(ErrorCode::UnsupportedFormat, std::string("PNM variant P") + bytes[1] + " is not supported");
  }
  detail::PgmHeaderReader reader(bytes);
  const long width = reader.next_int("width");
  const long height = reader.next_int("height");
  const long maxval = reader.next_int("maxval");
  if (width < 1 || height < 1) throw Error(ErrorCode::InvalidData, "PGM has empty dimensions");
  if (maxval != 255) {
    throw Error(ErrorCode::UnsupportedFormat, "only maxval 255 is supported, got " + std::to_string(maxval));
  }
  reader.single_space();
  const std::size_t count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (bytes.size() - reader.pos() < count) throw Error(ErrorCode::InvalidData, "PGM raster truncated");
  PgmImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos()),
                    bytes.begin() + static_cast<std::ptrdiff_t>(reader.pos() + count));
  return img;
}

inline std::string encode_pgm(const PgmImage& img) {
  std::string out = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  out.append(img.pixels.begin(), img.pixels.end());
  return out;
}

/// Clamp to [0, 255] then round half up.
inline unsigned char quantize(double v) {
  const double c = std::clamp(v, 0.0, 255.0);
  return static_cast<unsigned char>(std::floor(c + 0.5));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Writes through a sibling temp file so a failed write leaves no partial output.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::Io, "write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

inline FrameStack load_frames(std::vector<std::filesystem::path> paths) {
  if (paths.empty()) throw Error(ErrorCode::EmptyInput, "no frames given");
  std::sort(paths.begin(), paths.end(),
            [](const auto& a, const auto& b) { return a.filename().string() < b.filename().string(); });
  FrameStack stack;
  for (std::size_t k = 0; k < paths.size(); ++k) {
    PgmImage img;
    try {
      img = decode_pgm(read_file(paths[k]));
    } catch (const Error& e) {
      throw Error(e.code(), paths[k].string() + ": " + e.what());
    }
    if (k == 0) {
      stack.width = img.width;
      stack.height = img.height;
      stack.frames.resize(img.width * img.height, static_cast<Index>(paths.size()));
    } else if (img.width != stack.width || img.height != stack.height) {
      throw Error(ErrorCode::MixedDimensions, paths[k].string() + " is " + std::to_string(img.width) + "x" +
                                                  std::to_string(img.height) + ", expected " +
                                                  std::to_string(stack.width) + "x" + std::to_string(stack.height));
    }
    for (Index p = 0; p < stack.pixels(); ++p) {
      stack.frames(p, static_cast<Index>(k)) = img.pixels[static_cast<std::size_t>(p)];
    }
    stack.names.push_back(paths[k].stem().string());
  }
  return stack;
}

/// A directory (every *.pgm inside) or a glob over file names, e.g. "video/frame_*.pgm".
inline std::vector<std::filesystem::path> expand_frame_inputs(const std::string& spec) {
  namespace fs = std::filesystem;
  std::vector<fs::path> out;
  const fs::path p(spec);
  if (fs::is_directory(p)) {
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && entry.path().extension() == ".pgm") out.push_back(entry.path());
    }
  } else if (spec.find_first_of("*?[") != std::string::npos) {
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    const std::string pattern = p.filename().string();
    if (fs::is_directory(dir)) {
      for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && fnmatch(pattern.c_str(), entry.path().filename().c_str(), 0) == 0) {
          out.push_back(entry.path());
        }
      }
    }
  } else if (fs::is_regular_file(p)) {
    out.push_back(p);
  }
  if (out.empty()) throw Error(ErrorCode::EmptyInput, "no .pgm frames match '" + spec + "'");
  return out;
}

inline std::vector<std::filesystem::path> write_frames(const FrameStack& stack, const std::filesystem::path& dir,
                                                       const std::string& suffix = "") {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string());
  std::vector<std::filesystem::path> written;
  for (Index k = 0; k < stack.n(); ++k) {
    PgmImage img;
    img.width = stack.width;
    img.height = stack.height;
    img.pixels.resize(static_cast<std::size_t>(stack.pixels()));
    for (Index p = 0; p < stack.pixels(); ++p) img.pixels[static_cast<std::size_t>(p)] = quantize(stack.frames(p, k));
    const std::string name = k < static_cast<Index>(stack.names.size()) ? stack.names[static_cast<std::size_t>(k)]
                                                                        : "frame_" + std::to_string(k);
    const auto path = dir / (name + suffix + ".pgm");
    write_file_atomic(path, encode_pgm(img));
    written.push_back(path);
  }
  return written;
}

}  // namespace angemb

#endif  // ANGEMB_FRAMES_HPP
