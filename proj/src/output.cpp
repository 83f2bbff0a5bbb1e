#include "qswitch/output.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <unistd.h>

namespace qswitch {

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", value == 0.0 ? 0.0 : value);
  return buf;
}

std::vector<std::string> csv_columns(const Trajectory& tr) {
  std::vector<std::string> cols{"t_ns"};
  cols.insert(cols.end(), tr.labels.begin(), tr.labels.end());
  cols.emplace_back("trace");
  cols.emplace_back("min_eig");
  return cols;
}

void write_csv(std::ostream& out, const Trajectory& tr) {
  const auto cols = csv_columns(tr);
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
  out << '\n';
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    out << format_number(tr.times[i]);
    for (const auto& series : tr.values) out << ',' << format_number(series[i]);
    out << ',' << format_number(tr.trace[i]) << ',' << format_number(tr.min_eig[i]) << '\n';
  }
}

std::string to_csv(const Trajectory& tr) {
  std::ostringstream s;
  write_csv(s, tr);
  return s.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp.string());
    f.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    f.flush();
    if (!f) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("cannot rename onto " + path.string() + ": " + ec.message());
  }
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qswitch
