#pragma once

#include "gelfand/solver.hpp"

#include <iosfwd>
#include <vector>

namespace gelfand {

/// Crossings of u_alpha - u_beta on (0, r_max], alpha > beta.
struct IntersectionReport {
    double alpha;
    double beta;
    double r_max;
    std::vector<double> crossings;
    std::vector<double> tangencies;
    /// Minimum of u_alpha - u_beta over the scanned grid.
    double min_difference;
    /// Whether the two dense interpolants agree in sign with the difference
    /// ODE wherever their gap exceeds the integration noise.
    bool interpolant_agreement;
};

IntersectionReport find_intersections(const RadialSolution& sol_a, const RadialSolution& sol_b, double r_max);

/// alpha,beta,k,crossing_r with one row per crossing.
void write_crossings_csv(std::ostream& out, const std::vector<IntersectionReport>& reports);

/// alpha,beta,crossings,tangencies,min_difference with one row per pair.
void write_intersection_summary_csv(std::ostream& out, const std::vector<IntersectionReport>& reports);

}  // namespace gelfand
