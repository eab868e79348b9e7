#include "io/corrfile.hpp"

#include <fstream>
#include <sstream>

#include "io/text.hpp"

namespace mlpnp::io {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<double> parse_numbers(const std::string& line, size_t line_no, size_t expected) {
  std::istringstream ss(line);
  std::vector<double> values;
  std::string token;
  while (ss >> token) {
    double v = 0.0;
    if (!parse_double(token, v))
      throw Error(ErrorCode::parse_error,
                  "line " + std::to_string(line_no) + ": bad number '" + token + "'");
    values.push_back(v);
  }
  if (values.size() != expected)
    throw Error(ErrorCode::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(expected) + " values, got " +
                                            std::to_string(values.size()));
  return values;
}

}  // namespace

CorrespondenceFile read_correspondence_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");

  CorrespondenceFile data;
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_seen) {
      std::istringstream ss(body);
      std::string magic, version;
      ss >> magic >> version;
      if (magic != "mlpnp" || version != "v1")
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": expected header 'mlpnp v1'");
      header_seen = true;
      continue;
    }
    const auto v = parse_numbers(body, line_no, 8);
    data.points.emplace_back(v[0], v[1], v[2]);
    ImageObservationd obs;
    obs.pixel = Vec2<double>(v[3], v[4]);
    obs.pixel_cov << v[5], v[6], v[6], v[7];
    data.pixels.push_back(obs);
  }
  if (!header_seen) throw Error(ErrorCode::parse_error, "missing header 'mlpnp v1'");
  return data;
}

void write_correspondence_file(const std::string& path, const CorrespondenceFile& data,
                               const std::string& comment) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  out << "mlpnp v1\n";
  if (!comment.empty()) out << "# " << comment << "\n";
  out << "# px py pz  u v  s11 s12 s22\n";
  for (size_t i = 0; i < data.points.size(); ++i) {
    const auto& p = data.points[i];
    const auto& obs = data.pixels[i];
    out << format_full(p.x()) << ' ' << format_full(p.y()) << ' ' << format_full(p.z()) << "  "
        << format_full(obs.pixel.x()) << ' ' << format_full(obs.pixel.y()) << "  "
        << format_full(obs.pixel_cov(0, 0)) << ' ' << format_full(obs.pixel_cov(0, 1)) << ' '
        << format_full(obs.pixel_cov(1, 1)) << '\n';
  }
}

Posed read_pose_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open '" + path + "'");
  std::string line;
  size_t line_no = 0;
  bool header_seen = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = strip_comment(line);
    if (body.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (!header_seen) {
      std::istringstream ss(body);
      std::string magic, kind, version;
      ss >> magic >> kind >> version;
      if (magic != "mlpnp" || kind != "pose" || version != "v1")
        throw Error(ErrorCode::parse_error,
                    "line " + std::to_string(line_no) + ": expected header 'mlpnp pose v1'");
      header_seen = true;
      continue;
    }
    rows.push_back(parse_numbers(body, line_no, 3));
  }
  if (rows.size() != 4)
    throw Error(ErrorCode::parse_error, "pose file needs 3 rotation rows and 1 translation row");
  Posed pose;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) pose.rotation(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
  pose.translation = Vec3<double>(rows[3][0], rows[3][1], rows[3][2]);
  return pose;
}

void write_pose_file(const std::string& path, const Posed& pose) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write '" + path + "'");
  out << "mlpnp pose v1\n";
  for (int r = 0; r < 3; ++r)
    out << format_full(pose.rotation(r, 0)) << ' ' << format_full(pose.rotation(r, 1)) << ' '
        << format_full(pose.rotation(r, 2)) << '\n';
  out << format_full(pose.translation.x()) << ' ' << format_full(pose.translation.y()) << ' '
      << format_full(pose.translation.z()) << '\n';
}

}  // namespace mlpnp::io
