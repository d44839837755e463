#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "delayflock/metrics.hpp"
#include "delayflock/simulation.hpp"

namespace delayflock {

// Shortest form of "%.17g", independent of the locale.
std::string format_number(double value);

// Columns: t, x_i_k ..., v_i_k ... (1-based agent and component indices).
std::string trajectory_header(std::size_t n, std::size_t d);
std::string trajectory_csv(std::span<const TrajectoryRow> rows, std::size_t n, std::size_t d);

// Columns: t, X, V, d_X, d_V, mu, psi_star, R_tau, sigma_tau, lyap_L2,
// lyap_Linf, bound_V, bound_dV.
std::string diagnostics_header();
std::string diagnostics_csv(std::span<const DiagnosticsRow> rows);

// Throws IoError naming the path.
void write_file(const std::filesystem::path& path, std::string_view content);

}  // namespace delayflock
