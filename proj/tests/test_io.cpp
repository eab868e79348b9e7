#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "io/config.hpp"
#include "io/corrfile.hpp"
#include "io/text.hpp"

using namespace mlpnp;
using namespace mlpnp::io;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("mlpnp_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("full precision formatting round-trips doubles") {
  std::mt19937_64 rng(501);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double x = gauss(rng) * std::pow(10.0, i % 13 - 6);
    double back = 0.0;
    REQUIRE(parse_double(format_full(x), back));
    CHECK(back == x);
  }
}

TEST_CASE("correspondence file round trip is exact") {
  TempDir tmp;
  CorrespondenceFile data;
  std::mt19937_64 rng(503);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    data.points.emplace_back(gauss(rng), gauss(rng), 5.0 + gauss(rng));
    ImageObservationd obs;
    obs.pixel = Vec2<double>(800.0 * gauss(rng), 800.0 * gauss(rng));
    const double a = std::abs(gauss(rng)) + 0.5, c = std::abs(gauss(rng)) + 0.5;
    const double b = 0.1 * gauss(rng);
    obs.pixel_cov << a, b, b, c;
    data.pixels.push_back(obs);
  }

  const std::string path = tmp.file("corrs.txt");
  write_correspondence_file(path, data, "round trip fixture");
  const CorrespondenceFile back = read_correspondence_file(path);
  REQUIRE(back.points.size() == data.points.size());
  for (size_t i = 0; i < data.points.size(); ++i) {
    CHECK(back.points[i] == data.points[i]);
    CHECK(back.pixels[i].pixel == data.pixels[i].pixel);
    CHECK(back.pixels[i].pixel_cov == data.pixels[i].pixel_cov);
  }
}

TEST_CASE("parse errors name the offending line") {
  TempDir tmp;
  const std::string path = tmp.file("bad.txt");
  {
    std::ofstream out(path);
    out << "mlpnp v1\n";
    out << "1 2 3  4 5  1 0 1\n";
    out << "1 2 3  4 five  1 0 1\n";
  }
  CHECK_THROWS_AS(read_correspondence_file(path), Error);
  try {
    read_correspondence_file(path);
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::parse_error);
    CHECK(std::string(err.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("missing header is rejected") {
  TempDir tmp;
  const std::string path = tmp.file("noheader.txt");
  {
    std::ofstream out(path);
    out << "1 2 3  4 5  1 0 1\n";
  }
  CHECK_THROWS_AS(read_correspondence_file(path), Error);
}

TEST_CASE("wrong field count is rejected") {
  TempDir tmp;
  const std::string path = tmp.file("short.txt");
  {
    std::ofstream out(path);
    out << "mlpnp v1\n1 2 3 4 5 6 7\n";
  }
  try {
    read_correspondence_file(path);
    FAIL("expected ParseError");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::parse_error);
    CHECK(std::string(err.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("pose file round trip") {
  TempDir tmp;
  Posed pose;
  pose.rotation = Eigen::AngleAxisd(0.7, Vec3<double>(1, 2, 3).normalized()).toRotationMatrix();
  pose.translation = Vec3<double>(0.25, -1.5, 6.0);
  const std::string path = tmp.file("pose.txt");
  write_pose_file(path, pose);
  const Posed back = read_pose_file(path);
  CHECK(back.rotation == pose.rotation);
  CHECK(back.translation == pose.translation);
}

TEST_CASE("config parsing with comments and defaults") {
  const Config cfg = Config::from_string(
      "# a comment\n"
      "trials = 42\n"
      "sigma_max=7.5   # trailing comment\n"
      "planar=true\n"
      "name = paper defaults\n");
  CHECK(cfg.get_int("trials", 0) == 42);
  CHECK(cfg.get_double("sigma_max", 0.0) == 7.5);
  CHECK(cfg.get_bool("planar", false) == true);
  CHECK(cfg.get_string("name", "") == "paper defaults");
  CHECK(cfg.get_int("missing", 13) == 13);
  cfg.reject_unknown_keys();
}

TEST_CASE("config rejects unknown keys and bad values") {
  const Config cfg = Config::from_string("trials=10\ntypo_key=1\n");
  cfg.get_int("trials", 0);
  CHECK_THROWS_AS(cfg.reject_unknown_keys(), Error);

  const Config bad = Config::from_string("trials=ten\n");
  CHECK_THROWS_AS(bad.get_int("trials", 0), Error);

  CHECK_THROWS_AS(Config::from_string("no equals sign\n"), Error);
}
