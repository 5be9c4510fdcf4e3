#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wreach/dynamics.hpp"
#include "wreach/lyapunov.hpp"
#include "wreach/mayer.hpp"
#include "wreach/transport.hpp"

namespace wreach::io {

/// Shortest round-trip decimal ("%.17g").
std::string fmt(double x);

nlohmann::json measure_to_json(const DiscreteMeasure& nu);
/// Accepts {"points": [[...], ...], "weights": [...]}; weights default to uniform.
DiscreteMeasure measure_from_json(const nlohmann::json& j);

/// CSV with header x1,...,xd,w.
void write_measure_csv(std::ostream& os, const DiscreteMeasure& nu);
DiscreteMeasure read_measure_csv(std::istream& is);

/// Dispatches on the extension (.json or .csv).
DiscreteMeasure load_measure(const std::string& path);

nlohmann::json plan_to_json(const TransportPlan& plan);

/// Long format: t,particle,x1..xd,v1..vd,w. The velocity on the last node is
/// left at zero.
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& traj);

/// t,m2,admissibility_residual,mean_norm per node.
void write_summary_csv(std::ostream& os, const TrajectoryRecord& traj, const AdmissibilityReport& adm);

/// t,V,S,W2_to_target. The last column is omitted when `w2` is empty.
void write_decay_csv(std::ostream& os, const DecayReport& decay, const std::vector<double>& w2 = {});

/// t,value per DPP node.
void write_dpp_csv(std::ostream& os, const DppReport& dpp);

/// Writes `text` to `path`, throwing Error on failure.
void write_file(const std::string& path, const std::string& text);

}  // namespace wreach::io
