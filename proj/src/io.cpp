#include "qutrit/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace qutrit::io {

std::string fmt(double v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string channel_name(Channel c) {
  switch (c) {
    case Channel::A: return "A";
    case Channel::B: return "B";
    case Channel::AB: return "AB";
  }
  throw std::invalid_argument("channel_name: bad channel");
}

Channel channel_from_name(const std::string& s) {
  if (s == "A") return Channel::A;
  if (s == "B") return Channel::B;
  if (s == "AB") return Channel::AB;
  throw std::invalid_argument("channel_from_name: '" + s + "'");
}

std::string csv_table(const std::vector<std::string>& comments,
                      const std::vector<std::string>& header,
                      const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const std::string& c : comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out += ",";
    out += header[i];
  }
  out += "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ",";
      out += row[i];
    }
    out += "\n";
  }
  return out;
}

json json_matrix(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    json row = json::array();
    for (int j = 0; j < 3; ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

json json_sequence(const PulseSequence& seq) {
  json pulses = json::array();
  for (const Pulse& p : seq.pulses)
    pulses.push_back({{"channel", channel_name(p.ch)},
                      {"theta", p.theta},
                      {"phase", p.phase}});
  return {{"pulses", pulses},
          {"eta", seq.eta},
          {"eps", seq.eps},
          {"global_phase", seq.global_phase}};
}

PulseSequence sequence_from_json(const json& j) {
  PulseSequence seq;
  for (const json& p : j.at("pulses"))
    seq.pulses.push_back({channel_from_name(p.at("channel").get<std::string>()),
                          p.at("theta").get<double>(),
                          p.at("phase").get<double>()});
  seq.eta = j.at("eta").get<double>();
  seq.eps = j.at("eps").get<double>();
  seq.global_phase = j.at("global_phase").get<double>();
  return seq;
}

namespace {

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string esc(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&') out += "&amp;";
    else if (c == '<') out += "&lt;";
    else if (c == '>') out += "&gt;";
    else out += c;
  }
  return out;
}

struct Range {
  double lo = 0, hi = 1;
  void include(double v) {
    if (!std::isfinite(v)) return;
    if (empty) {
      lo = hi = v;
      empty = false;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  void pad() {
    if (hi - lo < 1e-300) {
      lo -= 1;
      hi += 1;
    } else {
      const double m = 0.05 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
  bool empty = true;
};

} // namespace

std::string svg_line_chart(const std::string& title, const std::string& xlabel,
                           const std::string& ylabel,
                           const std::vector<Series>& series, int width,
                           int height) {
  const double ml = 62, mr = 16, mt = 34, mb = 46;
  const double pw = width - ml - mr, ph = height - mt - mb;
  Range rx, ry;
  for (const Series& s : series) {
    for (double v : s.x) rx.include(v);
    for (double v : s.y) ry.include(v);
  }
  rx.pad();
  ry.pad();
  auto px = [&](double v) { return ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(width) + "\" height=\"" + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" "
       "font-size=\"14\">" + esc(title) + "</text>\n";
  // frame and ticks
  s += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
       "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fx = rx.lo + i * (rx.hi - rx.lo) / 5;
    const double fy = ry.lo + i * (ry.hi - ry.lo) / 5;
    s += "<line x1=\"" + fmt(px(fx)) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" +
         fmt(px(fx)) + "\" y2=\"" + fmt(mt + ph + 4) + "\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + fmt(mt + ph + 17) +
         "\" text-anchor=\"middle\">" + fmt(std::round(fx * 1e6) / 1e6) +
         "</text>\n";
    s += "<line x1=\"" + fmt(ml - 4) + "\" y1=\"" + fmt(py(fy)) + "\" x2=\"" +
         fmt(ml) + "\" y2=\"" + fmt(py(fy)) + "\" stroke=\"#444\"/>\n";
    s += "<text x=\"" + fmt(ml - 7) + "\" y=\"" + fmt(py(fy) + 4) +
         "\" text-anchor=\"end\">" + fmt(std::round(fy * 1e6) / 1e6) +
         "</text>\n";
  }
  s += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(height - 8.0) +
       "\" text-anchor=\"middle\">" + esc(xlabel) + "</text>\n";
  s += "<text x=\"14\" y=\"" + fmt(mt + ph / 2) +
       "\" text-anchor=\"middle\" transform=\"rotate(-90 14 " +
       fmt(mt + ph / 2) + ")\">" + esc(ylabel) + "</text>\n";
  // series
  for (std::size_t k = 0; k < series.size(); ++k) {
    const Series& sr = series[k];
    const char* col = kColors[k % 6];
    std::string pts;
    for (std::size_t i = 0; i < sr.x.size() && i < sr.y.size(); ++i) {
      if (i) pts += " ";
      pts += fmt(px(sr.x[i])) + "," + fmt(py(sr.y[i]));
    }
    s += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + col +
         "\" stroke-width=\"1.5\"/>\n";
    const double lx = ml + pw - 150, lyy = mt + 16 + 16 * k;
    s += "<line x1=\"" + fmt(lx) + "\" y1=\"" + fmt(lyy - 4) + "\" x2=\"" +
         fmt(lx + 22) + "\" y2=\"" + fmt(lyy - 4) + "\" stroke=\"" + col +
         "\" stroke-width=\"1.5\"/>\n";
    s += "<text x=\"" + fmt(lx + 27) + "\" y=\"" + fmt(lyy) + "\">" +
         esc(sr.label) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

std::string svg_bar_chart(const std::string& title,
                          const std::vector<std::string>& labels,
                          const std::vector<double>& a,
                          const std::string& label_a,
                          const std::vector<double>& b,
                          const std::string& label_b, int width, int height) {
  const double ml = 62, mr = 16, mt = 34, mb = 56;
  const double pw = width - ml - mr, ph = height - mt - mb;
  const std::size_t n = labels.size();
  Range ry;
  ry.include(0);
  for (double v : a) ry.include(v);
  for (double v : b) ry.include(v);
  ry.pad();
  auto py = [&](double v) { return mt + ph - (v - ry.lo) / (ry.hi - ry.lo) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
       std::to_string(width) + "\" height=\"" + std::to_string(height) +
       "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt(width / 2.0) + "\" y=\"20\" text-anchor=\"middle\" "
       "font-size=\"14\">" + esc(title) + "</text>\n";
  s += "<rect x=\"" + fmt(ml) + "\" y=\"" + fmt(mt) + "\" width=\"" + fmt(pw) +
       "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double fy = ry.lo + i * (ry.hi - ry.lo) / 5;
    s += "<text x=\"" + fmt(ml - 7) + "\" y=\"" + fmt(py(fy) + 4) +
         "\" text-anchor=\"end\">" + fmt(std::round(fy * 1e4) / 1e4) +
         "</text>\n";
  }
  if (ry.lo < 0 && ry.hi > 0)
    s += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(py(0)) + "\" x2=\"" +
         fmt(ml + pw) + "\" y2=\"" + fmt(py(0)) + "\" stroke=\"#999\"/>\n";
  const double group = n ? pw / n : pw;
  const double bar = group * 0.35;
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = ml + i * group + group * 0.12;
    const double va = i < a.size() ? a[i] : 0;
    const double vb = i < b.size() ? b[i] : 0;
    auto bar_rect = [&](double x, double v, const char* col) {
      const double y1 = py(std::max(v, 0.0)), y2 = py(std::min(v, 0.0));
      s += "<rect x=\"" + fmt(x) + "\" y=\"" + fmt(y1) + "\" width=\"" +
           fmt(bar) + "\" height=\"" + fmt(std::max(y2 - y1, 0.5)) +
           "\" fill=\"" + col + "\" fill-opacity=\"0.85\"/>\n";
    };
    bar_rect(x0, va, kColors[0]);
    bar_rect(x0 + bar * 1.1, vb, kColors[1]);
    s += "<text x=\"" + fmt(ml + i * group + group / 2) + "\" y=\"" +
         fmt(mt + ph + 16) + "\" text-anchor=\"middle\" font-size=\"10\">" +
         esc(labels[i]) + "</text>\n";
  }
  const double lx = ml + pw - 170;
  s += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(mt + 8.0) +
       "\" width=\"12\" height=\"12\" fill=\"" + std::string(kColors[0]) +
       "\"/><text x=\"" + fmt(lx + 17) + "\" y=\"" + fmt(mt + 18.0) + "\">" +
       esc(label_a) + "</text>\n";
  s += "<rect x=\"" + fmt(lx) + "\" y=\"" + fmt(mt + 26.0) +
       "\" width=\"12\" height=\"12\" fill=\"" + std::string(kColors[1]) +
       "\"/><text x=\"" + fmt(lx + 17) + "\" y=\"" + fmt(mt + 36.0) + "\">" +
       esc(label_b) + "</text>\n";
  s += "</svg>\n";
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << content;
  if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace qutrit::io
