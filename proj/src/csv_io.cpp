#include "buridan/csv_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "buridan/error.hpp"

namespace buridan {

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

void write_header(std::ostream& os, int dim, bool with_state) {
  os << "t,x";
  if (dim == 2) os << ",y";
  if (with_state) os << ",state";
  os << '\n';
}

void write_rows(std::ostream& os, const Eigen::VectorXd& times, const Eigen::MatrixXd& positions,
                const std::vector<int>* states) {
  for (Eigen::Index t = 0; t < positions.rows(); ++t) {
    os << format_real(times[t]);
    for (Eigen::Index c = 0; c < positions.cols(); ++c) os << ',' << format_real(positions(t, c));
    if (states) os << ',' << (*states)[static_cast<std::size_t>(t)];
    os << '\n';
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(ErrorKind::Io, "cannot open for writing: " + path);
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' ')) field.pop_back();
    out.push_back(field);
  }
  return out;
}

double parse_real(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double x = std::stod(s, &used);
    if (used == s.size()) return x;
  } catch (const std::exception&) {
  }
  fail(ErrorKind::Io, "line " + std::to_string(line_no) + ": not a number: '" + s + "'");
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  require(traj.dim() == 1 || traj.dim() == 2, ErrorKind::InvalidParameters, "CSV supports 1-D or 2-D positions");
  write_header(os, traj.dim(), true);
  write_rows(os, traj.times, traj.positions, &traj.states);
}

void write_observations_csv(std::ostream& os, const ObservationSeries& obs) {
  require(obs.dim() == 1 || obs.dim() == 2, ErrorKind::InvalidParameters, "CSV supports 1-D or 2-D positions");
  write_header(os, obs.dim(), false);
  write_rows(os, obs.times, obs.positions, nullptr);
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  auto os = open_for_write(path);
  write_trajectory_csv(os, traj);
  if (!os) fail(ErrorKind::Io, "write failed: " + path);
}

void write_observations_csv(const std::string& path, const ObservationSeries& obs) {
  auto os = open_for_write(path);
  write_observations_csv(os, obs);
  if (!os) fail(ErrorKind::Io, "write failed: " + path);
}

SeriesData read_series_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) fail(ErrorKind::Io, "empty series file");
  const auto header = split(line);
  const bool ok_header = header.size() >= 2 && header[0] == "t" && header[1] == "x";
  require(ok_header, ErrorKind::Io, "series header must start with t,x");
  int dim = 1;
  bool with_state = false;
  for (std::size_t c = 2; c < header.size(); ++c) {
    if (header[c] == "y" && c == 2)
      dim = 2;
    else if (header[c] == "state" && c + 1 == header.size())
      with_state = true;
    else
      fail(ErrorKind::Io, "unexpected column '" + header[c] + "'");
  }

  std::vector<double> times;
  std::vector<double> coords;
  std::vector<int> states;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split(line);
    require(fields.size() == header.size(), ErrorKind::Io, "line " + std::to_string(line_no) + ": wrong field count");
    times.push_back(parse_real(fields[0], line_no));
    for (int c = 0; c < dim; ++c) coords.push_back(parse_real(fields[1 + c], line_no));
    if (with_state) {
      int s = 0;
      const auto& f = fields.back();
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), s);
      require(ec == std::errc() && ptr == f.data() + f.size(), ErrorKind::Io,
              "line " + std::to_string(line_no) + ": bad state label");
      states.push_back(s);
    }
  }

  SeriesData out;
  const auto n = static_cast<Eigen::Index>(times.size());
  out.times = Eigen::Map<const Eigen::VectorXd>(times.data(), n);
  out.positions = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      coords.data(), n, dim);
  if (with_state) out.states = std::move(states);
  return out;
}

SeriesData read_series_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(ErrorKind::Io, "cannot open: " + path);
  return read_series_csv(is);
}

}  // namespace buridan
