#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qutrit/pulses.hpp"

namespace qutrit::io {

using json = nlohmann::ordered_json;

// Shortest stable formatting used for every numeric text artifact, so that
// identical runs produce byte-identical files.
std::string fmt(double v);

std::string channel_name(Channel c);
Channel channel_from_name(const std::string& s);

// CSV with leading '#' comment lines (resolved config), a header row, and
// data rows; cells are written verbatim.
std::string csv_table(const std::vector<std::string>& comments,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows);

// 3x3 complex matrix as nested [re, im] pairs, row-major.
json json_matrix(const Mat3& m);

json json_sequence(const PulseSequence& seq);
PulseSequence sequence_from_json(const json& j);

// Self-contained SVG plots built from primitives only.
struct Series {
  std::string label;
  std::vector<double> x, y;
};
std::string svg_line_chart(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<Series>& series, int width = 640,
                           int height = 420);

// Two series of bars side by side per category (e.g. reconstructed vs
// target matrix entries).
std::string svg_bar_chart(const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& a,
                          const std::string& label_a,
                          const std::vector<double>& b,
                          const std::string& label_b, int width = 720,
                          int height = 420);

void write_file(const std::string& path, const std::string& content);

} // namespace qutrit::io
