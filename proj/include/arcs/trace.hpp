#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace arcs {

/// One line of a trace CSV. Empty optionals become empty fields.
struct TraceRow {
  std::size_t iter = 0;
  std::optional<std::size_t> epoch;
  double f_train = 0.0;
  std::optional<double> f_test;
  std::optional<double> accuracy;
  double grad_norm = 0.0;
  std::optional<double> mu;
  std::optional<std::size_t> batch_size;
  std::optional<double> rho;
  std::optional<double> step_norm;
  std::optional<double> wall_seconds;
};

/// iter,epoch,f_train,f_test,accuracy,grad_norm,mu,batch_size,rho,step_norm,wall_seconds
std::string_view trace_header();

/// Fixed decimal notation with 12 significant digits; at most 30 decimals,
/// so values below 1e-19 lose digits. Non-finite values print as nan, inf, -inf.
std::string format_number(double x);

std::string format_row(const TraceRow& row);
void write_trace(std::ostream& out, const std::vector<TraceRow>& rows);
/// Throws std::runtime_error if the file cannot be written.
void write_trace_file(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

}  // namespace arcs
