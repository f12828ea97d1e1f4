#pragma once

#include <ostream>
#include <span>
#include <string>

#include "json.hpp"

#include "fbrs/bertrand.hpp"
#include "fbrs/dynamics.hpp"
#include "fbrs/fbrs_vector.hpp"
#include "fbrs/potential.hpp"
#include "fbrs/quadrature.hpp"
#include "fbrs/radial.hpp"

namespace fbrs::io {

using Json = nlohmann::ordered_json;

// CSV cells use the shortest representation that parses back to the same double.
using detail::shortest;

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  os << "t,x,y,vx,vy,r,theta,k\n";
  for (const auto& s : traj.samples) {
    os << shortest(s.t) << ',' << shortest(s.z.real()) << ',' << shortest(s.z.imag()) << ','
       << shortest(s.zdot.real()) << ',' << shortest(s.zdot.imag()) << ',' << shortest(s.r) << ','
       << shortest(s.theta) << ',' << s.k << '\n';
  }
}

inline void write_fbrs_csv(std::ostream& os, const FbrsTrace& trace) {
  os << "t,k,Ax,Ay\n";
  for (const auto& s : trace.samples) {
    os << shortest(s.t) << ',' << s.k << ',' << shortest(s.A.real()) << ',' << shortest(s.A.imag()) << '\n';
  }
}

inline void write_bertrand_csv(std::ostream& os, std::span<const BertrandCell> cells) {
  os << "p,level,E,L,ecc,phi,error\n";
  for (const auto& c : cells) {
    os << shortest(c.p) << ',' << shortest(c.level) << ',' << shortest(c.energy) << ',' << shortest(c.angmom) << ',';
    if (c.error.empty()) {
      os << shortest(c.eccentricity) << ',' << shortest(c.phi) << ",\n";
    } else {
      std::string msg = c.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
      }
      os << ",," << msg << '\n';
    }
  }
}

inline Json turning_report(const TurningPoints& tp) {
  return Json{{"r_min", tp.r_min},
              {"r_max", tp.r_max},
              {"class", to_string(OrbitClass::Bounded)},
              {"dVL_rm", tp.dVL_at_rmin},
              {"dVL_rM", tp.dVL_at_rmax}};
}

inline Json apsidal_report(const ApsidalResult& res) {
  return Json{{"phi", res.phi}, {"err", res.err_estimate}, {"evals", res.evaluations}};
}

inline Json conservation_report(const Trajectory& traj) {
  std::size_t peri = 0;
  std::size_t apo = 0;
  for (const auto& ev : traj.events) (ev.kind == ApsisKind::Pericenter ? peri : apo)++;
  return Json{{"max_rel_energy_drift", traj.conservation.max_rel_energy_drift},
              {"max_rel_angmom_drift", traj.conservation.max_rel_angmom_drift},
              {"radial_period", traj.radial_period},
              {"phi_apsidal", traj.apsidal_angle},
              {"samples", traj.samples.size()},
              {"pericenter_events", peri},
              {"apocenter_events", apo}};
}

inline Json jump_report(const FbrsTrace& trace) {
  Json jumps = Json::array();
  for (const auto& j : trace.jumps) {
    jumps.push_back(Json{{"t", j.t},
                         {"apsis", to_string(j.apsis)},
                         {"rotation", j.rotation},
                         {"modulus_before", std::abs(j.A_before)},
                         {"modulus_after", std::abs(j.A_after)}});
  }
  return Json{{"jumps", std::move(jumps)}, {"phi_apsidal", trace.phi_apsidal}};
}

inline Json error_report(const Error& e) {
  return Json{{"error", errc_name(e.code())}, {"message", e.what()}};
}

}  // namespace fbrs::io
