#include <gtest/gtest.h>

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "seeflow/frame_io.hpp"

namespace fs = std::filesystem;
using namespace seeflow;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("seeflow_frame_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Frame random_frame(std::size_t index, int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  Frame f(index, w, h);
  for (auto& p : f.pixels()) p = Rgb{std::uint8_t(rng()), std::uint8_t(rng()), std::uint8_t(rng())};
  return f;
}

void write_rgba_png(const fs::path& path, int w, int h) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  ASSERT_NE(fp, nullptr);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  png_init_io(png, fp);
  png_set_IHDR(png, info, w, h, 8, PNG_COLOR_TYPE_RGBA, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(static_cast<std::size_t>(w) * 4);
  for (int x = 0; x < w; ++x) {
    row[x * 4 + 0] = 10;
    row[x * 4 + 1] = 20;
    row[x * 4 + 2] = 30;
    row[x * 4 + 3] = 7;
  }
  for (int y = 0; y < h; ++y) png_write_row(png, row.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

}  // namespace

TEST(FrameIo, ThreeFramesGetTimestampsFromFps) {
  const auto dir = fresh_dir("three");
  for (std::size_t i = 0; i < 3; ++i) write_png(Frame(i, 640, 480), dir / frame_filename(i));
  const auto seq = load_frame_sequence(dir, 1.0);
  ASSERT_EQ(seq.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(seq[i].index(), i);
    EXPECT_EQ(seq[i].width(), 640);
    EXPECT_EQ(seq[i].height(), 480);
    EXPECT_DOUBLE_EQ(seq.timestamp(i), static_cast<double>(i));
  }
  const auto half = load_frame_sequence(dir, 2.0);
  EXPECT_DOUBLE_EQ(half.timestamp(1), 0.5);
}

TEST(FrameIo, EmptyDirectoryIsMissingFrameZero) {
  const auto dir = fresh_dir("empty");
  try {
    load_frame_sequence(dir, 1.0);
    FAIL() << "expected MissingFrame";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingFrame);
    EXPECT_NE(std::string(e.what()).find("index 0"), std::string::npos);
  }
}

TEST(FrameIo, MixedDimensionsNameOffendingIndex) {
  const auto dir = fresh_dir("mixed");
  write_png(Frame(0, 640, 480), dir / frame_filename(0));
  write_png(Frame(1, 800, 600), dir / frame_filename(1));
  try {
    load_frame_sequence(dir, 1.0);
    FAIL() << "expected DimensionMismatch";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DimensionMismatch);
    EXPECT_NE(std::string(e.what()).find("frame 1"), std::string::npos);
  }
}

TEST(FrameIo, GapIsReportedAtFirstMissingIndex) {
  const auto dir = fresh_dir("gap");
  for (std::size_t i : {0, 1, 3, 5}) write_png(Frame(i, 8, 8), dir / frame_filename(i));
  try {
    load_frame_sequence(dir, 1.0);
    FAIL() << "expected MissingFrame";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingFrame);
    EXPECT_NE(std::string(e.what()).find("index 2"), std::string::npos);
  }
}

TEST(FrameIo, SequenceWithoutFrameZeroIsMissingZero) {
  const auto dir = fresh_dir("nozero");
  write_png(Frame(1, 8, 8), dir / frame_filename(1));
  try {
    load_frame_sequence(dir, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingFrame);
    EXPECT_NE(std::string(e.what()).find("index 0"), std::string::npos);
  }
}

TEST(FrameIo, UndecodableFileIsDecodeError) {
  const auto dir = fresh_dir("garbage");
  std::ofstream(dir / frame_filename(0)) << "not a png";
  try {
    load_frame_sequence(dir, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DecodeError);
  }
}

TEST(FrameIo, RoundTripIsPixelIdentical) {
  const auto dir = fresh_dir("roundtrip");
  std::vector<Frame> frames;
  for (std::size_t i = 0; i < 4; ++i) frames.push_back(random_frame(i, 37, 21, 100 + i));
  const FrameSequence seq(frames, 1.0, "rt");
  write_frame_sequence(seq, dir);
  const auto back = load_frame_sequence(dir, 1.0);
  ASSERT_EQ(back.size(), seq.size());
  EXPECT_EQ(back.source_id(), "rt");
  for (std::size_t i = 0; i < seq.size(); ++i) EXPECT_TRUE(back[i].same_pixels(seq[i])) << "frame " << i;
}

TEST(FrameIo, LoadIsDeterministicAndIgnoresOtherFiles) {
  const auto dir = fresh_dir("determinism");
  // Written out of order, with unrelated files alongside.
  for (std::size_t i : {2, 0, 1}) write_png(random_frame(i, 9, 5, static_cast<std::uint32_t>(i)), dir / frame_filename(i));
  std::ofstream(dir / "notes.txt") << "x";
  std::ofstream(dir / "frame_1.png") << "short name is not a frame";
  const auto a = load_frame_sequence(dir, 1.0);
  const auto b = load_frame_sequence(dir, 1.0);
  ASSERT_EQ(a.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_TRUE(a[i].same_pixels(b[i]));
    EXPECT_TRUE(a[i].same_pixels(random_frame(i, 9, 5, static_cast<std::uint32_t>(i))));
  }
}

TEST(FrameIo, AlphaIsDropped) {
  const auto dir = fresh_dir("alpha");
  write_rgba_png(dir / frame_filename(0), 4, 3);
  const auto seq = load_frame_sequence(dir, 1.0);
  EXPECT_EQ(seq[0].at(2, 1), (Rgb{10, 20, 30}));
}

TEST(FrameIo, ManifestSuppliesSourceId) {
  const auto dir = fresh_dir("manifest");
  write_png(Frame(0, 4, 4), dir / frame_filename(0));
  write_manifest(dir, Manifest{"lesson-7", 2.0, 1});
  EXPECT_EQ(load_frame_sequence(dir, 1.0).source_id(), "lesson-7");
  EXPECT_EQ(load_frame_sequence(dir, 1.0, std::string("override")).source_id(), "override");
  const auto m = read_manifest(dir);
  ASSERT_TRUE(m);
  EXPECT_DOUBLE_EQ(m->fps, 2.0);
  EXPECT_EQ(m->frame_count, 1u);
}

TEST(FrameSequence, RejectsNonPositiveFpsAndGaps) {
  EXPECT_THROW(FrameSequence({Frame(0, 2, 2)}, 0.0, "x"), Error);
  try {
    FrameSequence({Frame(0, 2, 2), Frame(2, 2, 2)}, 1.0, "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingFrame);
  }
}

TEST(Frame, RejectsDegenerateDimensions) {
  EXPECT_THROW(Frame(0, 0, 5), Error);
  EXPECT_THROW(Frame(0, 2, 2, std::vector<Rgb>(3)), Error);
}
