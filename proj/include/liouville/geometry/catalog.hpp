#pragma once

#include <string>
#include <vector>

#include "liouville/geometry/chart.hpp"

namespace liouville::geometry {

/// Built-in manifolds: euclidean:<d>, cigar, sphere_stereo:<d>,
/// hyperbolic_halfplane, torus_flat:<d>. Throws ValidationError for unknown names.
ChartManifold catalog_manifold(const std::string& name);
bool is_catalog_name(const std::string& name);

/// Representative names, one per family (dimension 2, plus sphere_stereo:3).
std::vector<std::string> catalog_names();
/// Family patterns as accepted by catalog_manifold.
std::vector<std::string> catalog_patterns();

ChartManifold euclidean(int dim);
ChartManifold cigar();
ChartManifold sphere_stereo(int dim);
ChartManifold hyperbolic_halfplane();
ChartManifold torus_flat(int dim);

}  // namespace liouville::geometry
