#include "delayflock/csv.hpp"

#include <array>
#include <charconv>
#include <fstream>

#include "delayflock/errors.hpp"

namespace delayflock {

std::string format_number(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string trajectory_header(std::size_t n, std::size_t d) {
  std::string out = "t";
  for (const char channel : {'x', 'v'})
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t k = 1; k <= d; ++k)
        out += "," + std::string(1, channel) + "_" + std::to_string(i) + "_" + std::to_string(k);
  return out + "\n";
}

std::string trajectory_csv(std::span<const TrajectoryRow> rows, std::size_t n, std::size_t d) {
  std::string out = trajectory_header(n, d);
  for (const TrajectoryRow& row : rows) {
    if (row.x.rows() != n || row.x.cols() != d || !row.x.same_shape(row.v))
      throw ContractError("trajectory_csv: row shape does not match header");
    out += format_number(row.t);
    for (const double value : row.x.values()) out += "," + format_number(value);
    for (const double value : row.v.values()) out += "," + format_number(value);
    out += "\n";
  }
  return out;
}

std::string diagnostics_header() {
  return "t,X,V,d_X,d_V,mu,psi_star,R_tau,sigma_tau,lyap_L2,lyap_Linf,bound_V,bound_dV\n";
}

std::string diagnostics_csv(std::span<const DiagnosticsRow> rows) {
  std::string out = diagnostics_header();
  for (const DiagnosticsRow& r : rows) {
    const std::array<double, 13> cols{r.t,     r.X,         r.V,       r.d_X,     r.d_V,
                                      r.mu,    r.psi_star,  r.R_tau,   r.sigma_tau,
                                      r.lyap_L2, r.lyap_Linf, r.bound_V, r.bound_dV};
    for (std::size_t k = 0; k < cols.size(); ++k) {
      if (k > 0) out += ",";
      out += format_number(cols[k]);
    }
    out += "\n";
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open '" + path.string() + "' for writing");
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace delayflock
