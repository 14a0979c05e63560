#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "seeflow/error.hpp"
#include "seeflow/geometry.hpp"

namespace seeflow {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

constexpr Rgb inverted(Rgb c) {
  return Rgb{static_cast<std::uint8_t>(255 - c.r), static_cast<std::uint8_t>(255 - c.g),
             static_cast<std::uint8_t>(255 - c.b)};
}

// One decoded screenshot. Pixels are row-major RGB.
class Frame {
 public:
  Frame() = default;

  Frame(std::size_t index, int width, int height, Rgb fill = Rgb{255, 255, 255})
      : index_(index), width_(width), height_(height),
        pixels_(checked_area(width, height), fill) {}

  Frame(std::size_t index, int width, int height, std::vector<Rgb> pixels)
      : index_(index), width_(width), height_(height), pixels_(std::move(pixels)) {
    if (pixels_.size() != checked_area(width, height)) {
      throw Error(ErrorKind::DimensionMismatch,
                  "pixel buffer does not match " + std::to_string(width) + "x" +
                      std::to_string(height));
    }
  }

  std::size_t index() const { return index_; }
  void set_index(std::size_t index) { index_ = index; }
  int width() const { return width_; }
  int height() const { return height_; }
  Rect bounds() const { return Rect{0, 0, width_, height_}; }

  Rgb at(int x, int y) const { return pixels_[offset(x, y)]; }
  Rgb& at(int x, int y) { return pixels_[offset(x, y)]; }

  std::span<const Rgb> pixels() const { return pixels_; }
  std::span<Rgb> pixels() { return pixels_; }
  std::span<const Rgb> row(int y) const {
    return std::span<const Rgb>(pixels_).subspan(offset(0, y), static_cast<std::size_t>(width_));
  }

  void fill(const Rect& r, Rgb c) {
    for (int y = std::max(0, r.y1); y < std::min(height_, r.y2); ++y)
      for (int x = std::max(0, r.x1); x < std::min(width_, r.x2); ++x) at(x, y) = c;
  }

  bool same_pixels(const Frame& o) const {
    return width_ == o.width_ && height_ == o.height_ && pixels_ == o.pixels_;
  }

 private:
  static std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0) {
      throw Error(ErrorKind::DimensionMismatch, "frame dimensions must be positive");
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t offset(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
           static_cast<std::size_t>(x);
  }

  std::size_t index_ = 0;
  int width_ = 0;
  int height_ = 0;
  std::vector<Rgb> pixels_;
};

// Ordered, gap-free run of equally sized frames. Immutable after construction.
class FrameSequence {
 public:
  FrameSequence() = default;

  FrameSequence(std::vector<Frame> frames, double fps, std::string source_id)
      : frames_(std::move(frames)), fps_(fps), source_id_(std::move(source_id)) {
    if (!(fps_ > 0.0)) throw Error(ErrorKind::ParamError, "fps must be positive");
    for (std::size_t i = 0; i < frames_.size(); ++i) {
      if (frames_[i].index() != i) {
        throw Error(ErrorKind::MissingFrame,
                    "frame indices must be gap-free from 0; expected " + std::to_string(i));
      }
      if (frames_[i].width() != frames_[0].width() ||
          frames_[i].height() != frames_[0].height()) {
        throw Error(ErrorKind::DimensionMismatch,
                    "frame " + std::to_string(i) + " differs in size from frame 0");
      }
    }
  }

  std::size_t size() const { return frames_.size(); }
  bool empty() const { return frames_.empty(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  const Frame& at(std::size_t i) const { return frames_.at(i); }
  auto begin() const { return frames_.begin(); }
  auto end() const { return frames_.end(); }
  const std::vector<Frame>& frames() const { return frames_; }

  double fps() const { return fps_; }
  const std::string& source_id() const { return source_id_; }
  double timestamp(std::size_t i) const { return static_cast<double>(i) / fps_; }

 private:
  std::vector<Frame> frames_;
  double fps_ = 1.0;
  std::string source_id_;
};

}  // namespace seeflow
