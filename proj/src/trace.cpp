#include "aia/trace.hpp"

#include <ostream>
#include <sstream>

#include "json.hpp"

namespace aia {

namespace {
using Json = nlohmann::ordered_json;
}

void write_trace(std::ostream& out, const Trace& trace, bool include_timings) {
  for (const TraceRecord& rec : trace.records) {
    Json j;
    j["t"] = rec.t;
    j["fusion"] = rec.fusion;
    Json robots = Json::array();
    for (const auto& r : rec.robots) {
      Json jr;
      jr["id"] = r.id;
      jr["x"] = r.pose.x;
      jr["y"] = r.pose.y;
      jr["theta"] = r.pose.theta;
      jr["role"] = r.role == Role::Aia ? "aia" : "explore";
      jr["assigned"] = r.assigned;
      jr["v"] = r.control.v;
      jr["omega"] = r.control.omega;
      jr["plan_age"] = r.plan_age;
      jr["replanned"] = r.replanned;
      if (include_timings) jr["plan_s"] = r.plan_seconds;
      robots.push_back(std::move(jr));
    }
    j["robots"] = std::move(robots);
    Json landmarks = Json::array();
    for (const auto& l : rec.landmarks) {
      Json jl;
      jl["id"] = l.id;
      jl["det"] = l.det;
      jl["mean"] = Json::array({l.mean.x(), l.mean.y()});
      landmarks.push_back(std::move(jl));
    }
    j["landmarks"] = std::move(landmarks);
    out << j.dump() << "\n";
  }

  Json s;
  s["summary"] = true;
  s["terminal_step"] = trace.summary.terminal_step;
  s["timeout"] = trace.summary.timeout;
  s["records"] = trace.summary.records;
  s["seed"] = trace.summary.seed;
  s["plan_calls"] = trace.summary.plan_calls;
  if (include_timings) {
    s["plan_seconds_mean"] = trace.summary.plan_seconds_mean;
    s["plan_seconds_std"] = trace.summary.plan_seconds_std;
    s["voronoi_seconds_mean"] = trace.summary.voronoi_seconds_mean;
    s["wall_seconds"] = trace.summary.wall_seconds;
  }
  out << s.dump() << "\n";
}

std::string trace_to_string(const Trace& trace, bool include_timings) {
  std::ostringstream out;
  write_trace(out, trace, include_timings);
  return out.str();
}

}  // namespace aia
