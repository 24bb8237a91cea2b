#include "spinopt/trajectory_io.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "spinopt/errors.hpp"

namespace spinopt {
namespace {

using nlohmann::json;

double require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ContractError(std::string("non-finite ") + what + " in trajectory");
  return v;
}

double number_field(const json& rec, const char* key, std::size_t line) {
  auto it = rec.find(key);
  if (it == rec.end() || !it->is_number()) {
    throw ParseError(line, std::string("missing numeric field '") + key + "'");
  }
  return it->get<double>();
}

}  // namespace

void write_trajectory(std::ostream& os, const TrajectoryFile& traj) {
  json header = {{"fps", require_finite(traj.fps, "fps")},
                 {"frames", traj.frames.size()},
                 {"units", "m"}};
  os << header.dump() << '\n';
  for (const TrajectoryFrame& f : traj.frames) {
    json pts = json::array();
    for (const Point3& p : f.points) {
      pts.push_back({require_finite(p.x(), "coordinate"), require_finite(p.y(), "coordinate"),
                     require_finite(p.z(), "coordinate")});
    }
    json rec = {{"t", require_finite(f.t, "time")}, {"points", std::move(pts)}};
    os << rec.dump() << '\n';
  }
  if (!os) throw IoError("failed writing trajectory stream");
}

void write_trajectory(const std::filesystem::path& path, const TrajectoryFile& traj) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_trajectory(os, traj);
}

TrajectoryFile read_trajectory(std::istream& is) {
  TrajectoryFile out;
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::size_t> declared_frames;

  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) throw ParseError(line_no, "record is not an object");

    if (!declared_frames) {
      out.fps = number_field(rec, "fps", line_no);
      auto frames = rec.find("frames");
      if (frames == rec.end() || !frames->is_number_unsigned()) {
        throw ParseError(line_no, "header needs a non-negative integer 'frames'");
      }
      declared_frames = frames->get<std::size_t>();
      if (auto units = rec.find("units"); units != rec.end() && *units != "m") {
        throw ParseError(line_no, "only units \"m\" are supported");
      }
      if (!(out.fps > 0.0)) throw ParseError(line_no, "fps must be positive");
      continue;
    }

    TrajectoryFrame frame;
    frame.t = number_field(rec, "t", line_no);
    auto pts = rec.find("points");
    if (pts == rec.end() || !pts->is_array()) throw ParseError(line_no, "missing 'points' array");
    frame.points.reserve(pts->size());
    for (const json& p : *pts) {
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() ||
          !p[2].is_number()) {
        throw ParseError(line_no, "each point must be [x, y, z]");
      }
      frame.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    if (!out.frames.empty() && !(frame.t > out.frames.back().t)) {
      throw ParseError(line_no, "frame times must be strictly increasing");
    }
    if (frame.t < 0.0) throw ParseError(line_no, "frame time must be non-negative");
    out.frames.push_back(std::move(frame));
  }

  if (!declared_frames) throw ParseError(line_no + 1, "missing header record");
  if (out.frames.size() != *declared_frames) {
    throw ParseError(line_no, "header declares " + std::to_string(*declared_frames) +
                                  " frames, file has " + std::to_string(out.frames.size()));
  }
  return out;
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_trajectory(is);
}

std::filesystem::path sidecar_path(const std::filesystem::path& trajectory_path) {
  std::filesystem::path p = trajectory_path;
  p += ".truth.json";
  return p;
}

void write_sidecar(const std::filesystem::path& path, const GroundTruthSidecar& sidecar) {
  json j = {{"ground_truth_theta", sidecar.ground_truth_theta},
            {"dropped_at", sidecar.dropped_at ? json(*sidecar.dropped_at) : json(nullptr)},
            {"caught", sidecar.caught}};
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump() << '\n';
}

GroundTruthSidecar read_sidecar(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ParseError(1, e.what());
  }
  GroundTruthSidecar s;
  s.ground_truth_theta = j.at("ground_truth_theta").get<std::vector<double>>();
  if (!j.at("dropped_at").is_null()) s.dropped_at = j.at("dropped_at").get<int>();
  s.caught = j.at("caught").get<bool>();
  return s;
}

}  // namespace spinopt
