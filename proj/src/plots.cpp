#include "fsi/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

namespace fsi {

namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 72.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 56.0;

// Fixed two-decimal coordinates keep the output byte-stable.
std::string fx(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Scale {
  double lo = 0.0, hi = 1.0;
  bool log = false;
  double pixel_lo = 0.0, pixel_hi = 1.0;

  double map(double v) const {
    const double a = log ? std::log10(v) : v;
    return pixel_lo + (a - lo) / (hi - lo) * (pixel_hi - pixel_lo);
  }
};

Scale make_scale(double lo, double hi, bool log, double p0, double p1) {
  Scale s;
  s.log = log;
  s.pixel_lo = p0;
  s.pixel_hi = p1;
  if (!(lo <= hi)) {
    lo = log ? 1.0 : 0.0;
    hi = log ? 10.0 : 1.0;
  }
  s.lo = log ? std::log10(lo) : lo;
  s.hi = log ? std::log10(hi) : hi;
  if (s.hi - s.lo < 1e-12) {
    const double pad = log ? 0.5 : std::max(1e-12, std::abs(s.lo) * 0.1 + 1e-12);
    s.lo -= pad;
    s.hi += pad;
  }
  return s;
}

std::vector<double> ticks(const Scale& s) {
  std::vector<double> out;
  if (s.log) {
    for (double e = std::ceil(s.lo); e <= s.hi + 1e-9; e += 1.0) out.push_back(std::pow(10.0, e));
    if (out.size() < 2) {
      out = {std::pow(10.0, s.lo), std::pow(10.0, s.hi)};
    }
    return out;
  }
  for (int i = 0; i <= 4; ++i) out.push_back(s.lo + (s.hi - s.lo) * i / 4.0);
  return out;
}

bool usable(double v, bool log) { return std::isfinite(v) && (!log || v > 0.0); }

std::string frame(const PlotAxes& axes, const Scale& xs, const Scale& ys, bool x_ticks) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fx(kWidth) << "\" height=\""
    << fx(kHeight) << "\" viewBox=\"0 0 " << fx(kWidth) << ' ' << fx(kHeight) << "\">\n";
  o << "<rect x=\"0\" y=\"0\" width=\"" << fx(kWidth) << "\" height=\"" << fx(kHeight)
    << "\" fill=\"#ffffff\"/>\n";
  o << "<text x=\"" << fx(kWidth / 2) << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"15\">" << escape(axes.title) << "</text>\n";
  const double x0 = kLeft, x1 = kWidth - kRight, y0 = kHeight - kBottom, y1 = kTop;
  o << "<rect x=\"" << fx(x0) << "\" y=\"" << fx(y1) << "\" width=\"" << fx(x1 - x0) << "\" height=\""
    << fx(y0 - y1) << "\" fill=\"none\" stroke=\"#333333\"/>\n";
  for (double v : ticks(ys)) {
    const double py = ys.map(v);
    o << "<line x1=\"" << fx(x0 - 4) << "\" y1=\"" << fx(py) << "\" x2=\"" << fx(x0) << "\" y2=\""
      << fx(py) << "\" stroke=\"#333333\"/>\n";
    o << "<text x=\"" << fx(x0 - 6) << "\" y=\"" << fx(py + 4)
      << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(v)
      << "</text>\n";
  }
  if (x_ticks) {
    for (double v : ticks(xs)) {
      const double px = xs.map(v);
      o << "<line x1=\"" << fx(px) << "\" y1=\"" << fx(y0) << "\" x2=\"" << fx(px) << "\" y2=\""
        << fx(y0 + 4) << "\" stroke=\"#333333\"/>\n";
      o << "<text x=\"" << fx(px) << "\" y=\"" << fx(y0 + 17)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" << tick_label(v)
        << "</text>\n";
    }
  }
  o << "<text x=\"" << fx((x0 + x1) / 2) << "\" y=\"" << fx(kHeight - 14)
    << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << escape(axes.x_label)
    << "</text>\n";
  o << "<text x=\"16\" y=\"" << fx((y0 + y1) / 2) << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
       "font-size=\"12\" transform=\"rotate(-90 16 " << fx((y0 + y1) / 2) << ")\">"
    << escape(axes.y_label) << "</text>\n";
  return o.str();
}

void legend_entry(std::ostringstream& o, int row, const std::string& name, const std::string& color) {
  const double x = kWidth - kRight + 12, y = kTop + 12 + 18 * row;
  o << "<rect x=\"" << fx(x) << "\" y=\"" << fx(y - 8) << "\" width=\"12\" height=\"8\" fill=\""
    << color << "\"/>\n";
  o << "<text x=\"" << fx(x + 18) << "\" y=\"" << fx(y) << "\" font-family=\"sans-serif\" "
       "font-size=\"11\">" << escape(name) << "</text>\n";
}

}  // namespace

std::string svg_line_plot(const PlotAxes& axes, const std::vector<PlotSeries>& series) {
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    require(s.x.size() == s.y.size(), "svg_line_plot: series '" + s.name + "' has mismatched x/y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], axes.log_x) || !usable(s.y[i], axes.log_y)) continue;
      xmin = std::min(xmin, s.x[i]);
      xmax = std::max(xmax, s.x[i]);
      ymin = std::min(ymin, s.y[i]);
      ymax = std::max(ymax, s.y[i]);
    }
  }
  const Scale xs = make_scale(xmin, xmax, axes.log_x, kLeft, kWidth - kRight);
  const Scale ys = make_scale(ymin, ymax, axes.log_y, kHeight - kBottom, kTop);
  std::ostringstream o;
  o << frame(axes, xs, ys, true);
  int row = 0;
  std::vector<std::string> named;
  for (const auto& s : series) {
    o << "<polyline class=\"" << escape(s.css_class) << "\" fill=\"none\" stroke=\"" << s.color
      << "\" stroke-width=\"" << fx(s.width) << '"';
    if (s.dashed) o << " stroke-dasharray=\"6 4\"";
    o << " points=\"";
    bool first = true;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!usable(s.x[i], axes.log_x) || !usable(s.y[i], axes.log_y)) continue;
      o << (first ? "" : " ") << fx(xs.map(s.x[i])) << ',' << fx(ys.map(s.y[i]));
      first = false;
    }
    o << "\"/>\n";
    if (!s.name.empty() && std::find(named.begin(), named.end(), s.name) == named.end()) {
      named.push_back(s.name);
      legend_entry(o, row++, s.name, s.color);
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string svg_bar_chart(const PlotAxes& axes, const std::vector<std::string>& categories,
                          const std::vector<BarGroup>& groups) {
  double ymax = 0.0;
  for (const auto& g : groups) {
    require(g.values.size() == categories.size(), "svg_bar_chart: group '" + g.name +
                                                       "' needs one value per category");
    for (double v : g.values)
      if (std::isfinite(v)) ymax = std::max(ymax, v);
  }
  const Scale ys = make_scale(0.0, ymax > 0.0 ? 1.1 * ymax : 1.0, false, kHeight - kBottom, kTop);
  const Scale xs = make_scale(0.0, 1.0, false, kLeft, kWidth - kRight);
  std::ostringstream o;
  o << frame(axes, xs, ys, false);
  const double x0 = kLeft, x1 = kWidth - kRight;
  const double slot = categories.empty() ? 0.0 : (x1 - x0) / double(categories.size());
  const double bar = groups.empty() ? 0.0 : 0.8 * slot / double(groups.size());
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double left = x0 + slot * double(c) + 0.1 * slot;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double v = std::isfinite(groups[g].values[c]) ? std::max(0.0, groups[g].values[c]) : 0.0;
      const double top = ys.map(v);
      o << "<rect class=\"bar\" x=\"" << fx(left + bar * double(g)) << "\" y=\"" << fx(top)
        << "\" width=\"" << fx(bar) << "\" height=\"" << fx(kHeight - kBottom - top) << "\" fill=\""
        << groups[g].color << "\"/>\n";
    }
    o << "<text x=\"" << fx(x0 + slot * (double(c) + 0.5)) << "\" y=\"" << fx(kHeight - kBottom + 17)
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
      << escape(categories[c]) << "</text>\n";
  }
  for (std::size_t g = 0; g < groups.size(); ++g) legend_entry(o, int(g), groups[g].name, groups[g].color);
  o << "</svg>\n";
  return o.str();
}

std::vector<double> CsvTable::column(std::size_t c) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.at(c));
  return out;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path);
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(path + ": empty CSV");
  std::istringstream head(line);
  std::string cell;
  while (std::getline(head, cell, ',')) t.columns.push_back(cell);
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument(path + ": bad number '" + cell + "' on line " + std::to_string(line_no));
      }
    }
    if (row.size() != t.columns.size()) {
      throw InvalidArgument(path + ": line " + std::to_string(line_no) + " has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(t.columns.size()));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};

std::string path_in(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

bool has_scalar(const DiagnosticsReport& r, const std::string& k) { return r.scalars.count(k) > 0; }

}  // namespace

std::vector<std::string> emit_plots(DiagnosticsReport& report, const std::string& dir) {
  std::vector<std::string> written;
  auto save = [&](const std::string& name, const std::string& svg) {
    write_text_file(path_in(dir, name), svg);
    written.push_back(name);
  };

  // trace decay: one polyline per ensemble member, the ensemble sup, the fit
  const std::string decay_csv = path_in(dir, "trace_decay.csv");
  if (std::filesystem::exists(decay_csv)) {
    const CsvTable t = read_csv(decay_csv);
    const std::vector<double> time = t.column(0);
    std::vector<PlotSeries> series;
    for (std::size_t c = 1; c < t.columns.size(); ++c) {
      PlotSeries s;
      s.x = time;
      s.y = t.column(c);
      if (t.columns[c] == "sup") {
        s.name = "ensemble sup";
        s.css_class = "sup";
        s.color = "#000000";
        s.width = 2.0;
      } else {
        s.css_class = "member";
        s.color = "#9ecae1";
        s.width = 0.8;
      }
      series.push_back(std::move(s));
    }
    if (has_scalar(report, "singular_fit.exponent") && has_scalar(report, "singular_fit.prefactor")) {
      const double a = report.scalars.at("singular_fit.exponent");
      const double c = report.scalars.at("singular_fit.prefactor");
      const double t0 = report.scalars.at("singular_fit.t_min");
      const double t1 = report.scalars.at("singular_fit.t_max");
      PlotSeries fit;
      fit.name = "fit t^-" + tick_label(a);
      fit.css_class = "fit";
      fit.color = "#d62728";
      fit.width = 2.0;
      fit.dashed = true;
      fit.x = {t0, t1};
      fit.y = {c * std::pow(t0, -a), c * std::pow(t1, -a)};
      series.push_back(std::move(fit));
    } else {
      report.notes.push_back("trace decay plot drawn without a fit line: no fit in the report");
    }
    save("trace_decay.svg",
         svg_line_plot({"Interface trace decay", "t", "|u1(t)| on the interface", true, true}, series));
  } else {
    report.notes.push_back("trace decay plot skipped: trace_decay.csv not found");
  }

  // gains per level
  const auto gains = report.tables.find("gain_study.gains");
  if (gains != report.tables.end() && !gains->second.rows.empty()) {
    std::vector<std::string> cats;
    BarGroup raw{"raw", {}, kPalette[0]}, smooth{"smoothed", {}, kPalette[1]};
    for (const auto& row : gains->second.rows) {
      cats.push_back(std::to_string(int(row[0])));
      raw.values.push_back(row[2]);
      smooth.values.push_back(row[3]);
    }
    save("gain_levels.svg", svg_bar_chart({"Gain norm per level", "level", "gain norm"}, cats,
                                          {raw, smooth}));
  } else {
    report.notes.push_back("gain plot skipped: no gain study results");
  }

  // cost convergence of the CG oracle
  const std::string cost_csv = path_in(dir, "cost_convergence.csv");
  if (std::filesystem::exists(cost_csv)) {
    const CsvTable t = read_csv(cost_csv);
    PlotSeries s;
    s.name = "J";
    s.x = t.column(0);
    s.y = t.column(1);
    std::vector<PlotSeries> series{s};
    if (t.columns.size() > 2) {
      PlotSeries g;
      g.name = "|grad|";
      g.css_class = "gradient";
      g.color = kPalette[1];
      g.x = t.column(0);
      g.y = t.column(2);
      series.push_back(g);
    }
    save("cost_convergence.svg",
         svg_line_plot({"Oracle convergence", "iteration", "value", false, true}, series));
  } else {
    report.notes.push_back("cost convergence plot skipped: cost_convergence.csv not found");
  }

  // L_p norms of the u2 trace per level
  const auto lp = report.tables.find("lp_trace.u2_lp");
  if (lp != report.tables.end() && lp->second.columns.size() > 1) {
    std::vector<PlotSeries> series;
    for (std::size_t c = 1; c < lp->second.columns.size(); ++c) {
      PlotSeries s;
      s.name = lp->second.columns[c];
      s.color = kPalette[(c - 1) % 6];
      for (const auto& row : lp->second.rows) {
        s.x.push_back(row[0]);
        s.y.push_back(row[c]);
      }
      series.push_back(std::move(s));
    }
    save("lp_norms.svg", svg_line_plot({"u2 trace L_p norms", "level", "norm", true, false}, series));
  } else {
    report.notes.push_back("L_p plot skipped: empty p list or no L_p study");
  }
  return written;
}

}  // namespace fsi
