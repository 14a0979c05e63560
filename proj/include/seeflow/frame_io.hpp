#pragma once

// PNG frame directories: frame_%06d.png plus an optional manifest.json.

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include <json.hpp>

#include "seeflow/error.hpp"
#include "seeflow/frame.hpp"

namespace seeflow {

namespace fs = std::filesystem;

struct Manifest {
  std::string source_id;
  double fps = 1.0;
  std::size_t frame_count = 0;
};

inline std::string frame_filename(std::size_t index) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frame_%06zu.png", index);
  return buf;
}

namespace detail {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace detail

inline Frame read_png(const fs::path& path, std::size_t index) {
  detail::FilePtr file(std::fopen(path.c_str(), "rb"));
  if (!file) throw Error(ErrorKind::DecodeError, "cannot open " + path.string());

  png_byte header[8];
  if (std::fread(header, 1, 8, file.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
    throw Error(ErrorKind::DecodeError, path.string() + " is not a PNG file");
  }

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::DecodeError, "png_create_read_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw Error(ErrorKind::DecodeError, "png_create_info_struct failed");
  }

  // Rows are decoded into this buffer; declared before setjmp so the longjmp path can free it.
  std::vector<png_byte> data;
  std::vector<png_bytep> rows;
  png_uint_32 width = 0;
  png_uint_32 height = 0;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::DecodeError, "corrupt PNG data in " + path.string());
  }

  png_init_io(png, file.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  width = png_get_image_width(png, info);
  height = png_get_image_height(png, info);
  const int color_type = png_get_color_type(png, info);
  const int bit_depth = png_get_bit_depth(png, info);

  if (bit_depth == 16) png_set_strip_16(png);
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA)
    png_set_gray_to_rgb(png);
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_read_update_info(png, info);

  const std::size_t rowbytes = png_get_rowbytes(png, info);
  if (rowbytes != static_cast<std::size_t>(width) * 3) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw Error(ErrorKind::DecodeError, "unsupported PNG layout in " + path.string());
  }
  data.resize(rowbytes * height);
  rows.resize(height);
  for (png_uint_32 y = 0; y < height; ++y) rows[y] = data.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  std::vector<Rgb> pixels(static_cast<std::size_t>(width) * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    pixels[i] = Rgb{data[3 * i], data[3 * i + 1], data[3 * i + 2]};
  }
  return Frame(index, static_cast<int>(width), static_cast<int>(height), std::move(pixels));
}

inline void write_png(const Frame& frame, const fs::path& path) {
  detail::FilePtr file(std::fopen(path.c_str(), "wb"));
  if (!file) throw Error(ErrorKind::IoError, "cannot create " + path.string());

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw Error(ErrorKind::IoError, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw Error(ErrorKind::IoError, "png_create_info_struct failed");
  }

  std::vector<png_byte> data(static_cast<std::size_t>(frame.width()) * frame.height() * 3);
  const auto px = frame.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    data[3 * i] = px[i].r;
    data[3 * i + 1] = px[i].g;
    data[3 * i + 2] = px[i].b;
  }
  std::vector<png_bytep> rows(static_cast<std::size_t>(frame.height()));
  for (int y = 0; y < frame.height(); ++y)
    rows[static_cast<std::size_t>(y)] = data.data() + static_cast<std::size_t>(y) * frame.width() * 3;

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw Error(ErrorKind::IoError, "failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(frame.width()),
               static_cast<png_uint_32>(frame.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_set_compression_level(png, 3);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

inline std::optional<Manifest> read_manifest(const fs::path& dir) {
  const fs::path path = dir / "manifest.json";
  if (!fs::exists(path)) return std::nullopt;
  std::ifstream in(path);
  try {
    const auto j = nlohmann::json::parse(in);
    Manifest m;
    m.source_id = j.value("source_id", dir.filename().string());
    m.fps = j.value("fps", 1.0);
    m.frame_count = j.value("frame_count", std::size_t{0});
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::DecodeError, "manifest.json: " + std::string(e.what()));
  }
}

inline void write_manifest(const fs::path& dir, const Manifest& m) {
  nlohmann::json j{{"source_id", m.source_id}, {"fps", m.fps}, {"frame_count", m.frame_count}};
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error(ErrorKind::IoError, "cannot write manifest in " + dir.string());
  out << j.dump(2) << '\n';
}

// Loads frame_NNNNNN.png files in index order. Other files in the directory are ignored.
inline FrameSequence load_frame_sequence(const fs::path& dir, double fps,
                                         std::optional<std::string> source_id = std::nullopt) {
  if (!fs::is_directory(dir)) {
    throw Error(ErrorKind::MissingFrame, dir.string() + " is not a directory; frame 0 missing");
  }
  static const std::regex pattern(R"(frame_(\d{6})\.png)");
  std::map<std::size_t, fs::path> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    std::smatch m;
    if (entry.is_regular_file() && std::regex_match(name, m, pattern)) {
      found.emplace(std::stoul(m[1].str()), entry.path());
    }
  }

  std::vector<Frame> frames;
  frames.reserve(found.size());
  std::size_t expected = 0;
  for (const auto& [index, path] : found) {
    if (index != expected) {
      throw Error(ErrorKind::MissingFrame, "frame index " + std::to_string(expected) + " missing in " +
                                               dir.string());
    }
    Frame f = read_png(path, index);
    if (!frames.empty() &&
        (f.width() != frames.front().width() || f.height() != frames.front().height())) {
      throw Error(ErrorKind::DimensionMismatch,
                  "frame " + std::to_string(index) + " is " + std::to_string(f.width()) + "x" +
                      std::to_string(f.height()) + ", expected " +
                      std::to_string(frames.front().width()) + "x" +
                      std::to_string(frames.front().height()));
    }
    frames.push_back(std::move(f));
    ++expected;
  }
  if (frames.empty()) {
    throw Error(ErrorKind::MissingFrame, "frame index 0 missing in " + dir.string());
  }

  std::string id;
  if (source_id) {
    id = *source_id;
  } else if (auto m = read_manifest(dir)) {
    id = m->source_id;
  } else {
    id = fs::absolute(dir).lexically_normal().filename().string();
  }
  return FrameSequence(std::move(frames), fps, std::move(id));
}

inline void write_frame_sequence(const FrameSequence& seq, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& f : seq) write_png(f, dir / frame_filename(f.index()));
  write_manifest(dir, Manifest{seq.source_id(), seq.fps(), seq.size()});
}

}  // namespace seeflow
