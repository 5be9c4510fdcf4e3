#include "wreach/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "wreach/errors.hpp"

namespace wreach::io {

using nlohmann::json;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json measure_to_json(const DiscreteMeasure& nu) {
  json pts = json::array();
  for (Eigen::Index i = 0; i < nu.points().rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < nu.points().cols(); ++j) row.push_back(nu.points()(i, j));
    pts.push_back(std::move(row));
  }
  json w = json::array();
  for (Eigen::Index i = 0; i < nu.weights().size(); ++i) w.push_back(nu.weights()(i));
  return {{"points", std::move(pts)}, {"weights", std::move(w)}};
}

DiscreteMeasure measure_from_json(const json& j) {
  if (!j.is_object() || !j.contains("points") || !j["points"].is_array())
    throw ConstructionError("measure JSON needs a \"points\" array");
  const json& pts = j["points"];
  if (pts.empty()) throw ConstructionError("measure JSON has empty support");
  const std::size_t d = pts[0].size();
  if (d == 0) throw ConstructionError("measure JSON points must be non-empty arrays");
  Matrix X(static_cast<Eigen::Index>(pts.size()), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].is_array() || pts[i].size() != d) throw DimensionError("measure JSON points have ragged dimensions");
    for (std::size_t k = 0; k < d; ++k) X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = pts[i][k].get<double>();
  }
  if (!j.contains("weights")) return DiscreteMeasure::uniform(std::move(X));
  const json& w = j["weights"];
  Vector W(static_cast<Eigen::Index>(w.size()));
  for (std::size_t i = 0; i < w.size(); ++i) W(static_cast<Eigen::Index>(i)) = w[i].get<double>();
  return DiscreteMeasure::make(std::move(X), std::move(W));
}

void write_measure_csv(std::ostream& os, const DiscreteMeasure& nu) {
  for (int k = 0; k < nu.dim(); ++k) os << 'x' << k + 1 << ',';
  os << "w\n";
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vector x = nu.point(i);
    for (int k = 0; k < nu.dim(); ++k) os << fmt(x(k)) << ',';
    os << fmt(nu.weight(i)) << '\n';
  }
}

DiscreteMeasure read_measure_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConstructionError("measure CSV is empty");
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConstructionError("measure CSV: bad number '" + cell + "'");
      }
    }
    if (row.size() < 2) throw ConstructionError("measure CSV rows need at least one coordinate and a weight");
    if (!rows.empty() && row.size() != rows.front().size()) throw DimensionError("measure CSV rows are ragged");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConstructionError("measure CSV has empty support");
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto d = static_cast<Eigen::Index>(rows.front().size() - 1);
  Matrix X(n, d);
  Vector W(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = 0; k < d; ++k) X(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
    W(i) = rows[static_cast<std::size_t>(i)].back();
  }
  return DiscreteMeasure::make(std::move(X), std::move(W));
}

DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  const auto dot = path.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : path.substr(dot);
  if (ext == ".csv") return read_measure_csv(in);
  if (ext == ".json") {
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConstructionError(path + ": " + e.what());
    }
    return measure_from_json(j);
  }
  throw Error("unrecognized measure file extension: " + path);
}

json plan_to_json(const TransportPlan& plan) {
  json m = json::array();
  for (Eigen::Index i = 0; i < plan.matrix.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < plan.matrix.cols(); ++j) row.push_back(plan.matrix(i, j));
    m.push_back(std::move(row));
  }
  return {{"source", measure_to_json(plan.source)},
          {"target", measure_to_json(plan.target)},
          {"matrix", std::move(m)},
          {"cost", plan.cost},
          {"w2", std::sqrt(std::max(plan.cost, 0.0))},
          {"optimal", plan.optimal}};
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj) {
  const int d = traj.initial().dim();
  os << "t,particle";
  for (int k = 0; k < d; ++k) os << ",x" << k + 1;
  for (int k = 0; k < d; ++k) os << ",v" << k + 1;
  os << ",w\n";
  for (std::size_t n = 0; n < traj.measures.size(); ++n) {
    const DiscreteMeasure& mu = traj.measures[n];
    for (std::size_t i = 0; i < mu.size(); ++i) {
      os << fmt(traj.times[n]) << ',' << i;
      const Vector x = mu.point(i);
      for (int k = 0; k < d; ++k) os << ',' << fmt(x(k));
      const Vector v = n < traj.velocities.size() ? traj.velocities[n].at(i) : Vector::Zero(d);
      for (int k = 0; k < d; ++k) os << ',' << fmt(v(k));
      os << ',' << fmt(mu.weight(i)) << '\n';
    }
  }
}

void write_summary_csv(std::ostream& os, const TrajectoryRecord& traj, const AdmissibilityReport& adm) {
  os << "t,m2,admissibility_residual,mean_norm\n";
  for (std::size_t n = 0; n < traj.measures.size(); ++n) {
    const DiscreteMeasure& mu = traj.measures[n];
    const double r = n < adm.residuals.size() ? adm.residuals[n] : 0.0;
    os << fmt(traj.times[n]) << ',' << fmt(moment2(mu).value) << ',' << fmt(r) << ',' << fmt(mu.mean().norm())
       << '\n';
  }
}

void write_decay_csv(std::ostream& os, const DecayReport& decay, const std::vector<double>& w2) {
  const bool with_w2 = !w2.empty();
  os << "t,V,S" << (with_w2 ? ",W2_to_target" : "") << '\n';
  for (std::size_t n = 0; n < decay.times.size(); ++n) {
    os << fmt(decay.times[n]) << ',' << fmt(decay.V_values[n]) << ',' << fmt(decay.S_values[n]);
    if (with_w2) os << ',' << fmt(w2[n]);
    os << '\n';
  }
}

void write_dpp_csv(std::ostream& os, const DppReport& dpp) {
  os << "t,value\n";
  for (std::size_t n = 0; n < dpp.times.size(); ++n) os << fmt(dpp.times[n]) << ',' << fmt(dpp.values[n]) << '\n';
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace wreach::io
