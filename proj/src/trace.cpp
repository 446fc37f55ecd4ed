#include "arcs/trace.hpp"

#include <cmath>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <type_traits>

namespace arcs {

namespace {

constexpr int kSignificant = 12;
constexpr int kMaxDecimals = 30;

std::string fixed(double x, int decimals) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, x);
  return buf;
}

int significant_digits(const std::string& s) {
  int count = 0;
  bool leading = true;
  for (char c : s) {
    if (c < '0' || c > '9') continue;
    if (leading && c == '0') continue;
    leading = false;
    ++count;
  }
  return count;
}

template <class T>
void field(std::string& out, const std::optional<T>& v) {
  out += ',';
  if (!v) return;
  if constexpr (std::is_floating_point_v<T>)
    out += format_number(*v);
  else
    out += std::to_string(*v);
}

}  // namespace

std::string_view trace_header() {
  return "iter,epoch,f_train,f_test,accuracy,grad_norm,mu,batch_size,rho,step_norm,wall_seconds";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0.0) return fixed(0.0, kSignificant - 1);
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(x))));
  int decimals = std::clamp(kSignificant - 1 - exponent, 0, kMaxDecimals);
  std::string s = fixed(x, decimals);
  // Rounding up across a power of ten (9.99... -> 10.0...) adds a digit.
  if (decimals > 0 && significant_digits(s) > kSignificant) s = fixed(x, decimals - 1);
  if (s == "-" + fixed(0.0, decimals)) s.erase(0, 1);
  return s;
}

std::string format_row(const TraceRow& row) {
  std::string out = std::to_string(row.iter);
  field(out, row.epoch);
  out += ',';
  out += format_number(row.f_train);
  field(out, row.f_test);
  field(out, row.accuracy);
  out += ',';
  out += format_number(row.grad_norm);
  field(out, row.mu);
  field(out, row.batch_size);
  field(out, row.rho);
  field(out, row.step_norm);
  field(out, row.wall_seconds);
  return out;
}

void write_trace(std::ostream& out, const std::vector<TraceRow>& rows) {
  out << trace_header() << '\n';
  for (const auto& r : rows) out << format_row(r) << '\n';
}

void write_trace_file(const std::filesystem::path& path, const std::vector<TraceRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_trace(out, rows);
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace arcs
