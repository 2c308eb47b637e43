#pragma once

#include <string>

#include "dirac/reduced_dynamics.hpp"

namespace dirac {

// Phase portrait of a reduced trajectory: axes, the circle q^2 + p^2 = R^2
// bounding the domain, and the orbit as a polyline.
std::string phase_portrait_svg(const TrajectoryRecord& record, double radius, const std::string& title);

}  // namespace dirac
