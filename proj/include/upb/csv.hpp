#ifndef UPB_CSV_HPP
#define UPB_CSV_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace upb {

/// %.17g formatting, round-trip exact for doubles and stable across reruns.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Minimal CSV emitter: header row once, then value rows.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns) : f_(path) {
    if (!f_) throw std::runtime_error("CsvWriter: cannot open " + path);
    for (size_t i = 0; i < columns.size(); ++i) f_ << (i ? "," : "") << columns[i];
    f_ << '\n';
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) f_ << (i ? "," : "") << cells[i];
    f_ << '\n';
  }
  ~CsvWriter() = default;

 private:
  std::ofstream f_;
};

}  // namespace upb

#endif
