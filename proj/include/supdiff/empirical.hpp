#pragma once

#include <span>
#include <utility>

#include "supdiff/distributions.hpp"
#include "supdiff/grid.hpp"

namespace supdiff {

/// Empirical distribution function of a sample.
///
/// In dimension 1 the result is a cadlag step function on the compactified
/// line whose nodes are -inf, the distinct sample points, and +inf; the value
/// channel holds #{X_i <= x}/n and the left channel #{X_i < x}/n. In higher
/// dimension it is F_n on the lattice of per-axis distinct coordinates with
/// -inf/+inf sentinels on every axis.
GridFunction ecdf(const Sample& sample);

/// F_n(x) = #{i : X_i <= x coordinatewise} / n at an arbitrary point.
double ecdf_at(const Sample& sample, std::span<const double> x);

/// F_n at the nodes of a lattice (any dimension, including 1 without channels).
GridFunction ecdf_on_lattice(const Sample& sample, DomainPtr lattice);

/// sqrt(n) (F_n - F) on a one-dimensional grid, with both channels.
GridFunction empirical_process(const Sample& sample, const UnivariateCdf& F, DomainPtr grid);
/// sqrt(n) (F_n - F) on a lattice.
GridFunction empirical_process(const Sample& sample, const JointCdf& F, DomainPtr grid);

/// C_n(u) = F_n(F_{n,1}^-1(u_1), ..., F_{n,d}^-1(u_d)) on a lattice in [0,1]^d.
///
/// With the generalized inverse, X_ik <= F_{n,k}^-1(u_k) exactly when the
/// minimum rank of X_ik is below n u_k + 1, so ties are counted at the first
/// level that reaches them.
GridFunction empirical_copula(const Sample& sample, DomainPtr lattice);

/// The rank lattice {0, 1/n, ..., 1}^d.
DomainPtr rank_lattice(std::size_t n, std::size_t dimension);

/// Ranks per coordinate (1-based minimum ranks, so ties share the lowest rank).
std::vector<std::size_t> min_ranks(std::span<const double> values);

/// C_bar(u, v) = u + v - 1 + C(1 - u, 1 - v) on a reflection-closed lattice.
GridFunction survival_copula(const GridFunction& C);

/// Whether every axis of a lattice satisfies a_i + a_{N-1-i} = 1.
bool reflection_closed(const GridDomain& lattice, double tolerance = 1e-12);
/// Node index of (1 - u_1, ..., 1 - u_d) on a reflection-closed lattice.
std::size_t reflected_node(const GridDomain& lattice, std::size_t node);

/// Multilinear interpolation of a lattice function at u, clamped to the lattice box.
double interpolate(const GridFunction& f, std::span<const double> u);

/// First-order partial derivatives of a bivariate copula by finite
/// differences with step h: central where both u +- h lie in [0, 1],
/// one-sided otherwise. Results are clamped to [0, 1].
std::pair<GridFunction, GridFunction> copula_partials(const Copula& C, DomainPtr lattice, double h);
/// Same, for a copula tabulated on a lattice (read by multilinear interpolation).
std::pair<GridFunction, GridFunction> copula_partials(const GridFunction& C, double h);

/// Default bandwidth for estimated copulas: n^-1/2, but never below one lattice cell.
double default_partial_bandwidth(std::size_t n, const GridDomain& lattice);

}  // namespace supdiff
