#include "echowall/plots.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace echowall {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Series {
  std::string label;
  std::string color;
  std::vector<std::pair<double, double>> points;  // (x, y)
};

// Fixed-size line chart with left/bottom axes and a small legend.
std::string render_chart(const std::string& title, const std::string& x_label,
                         const std::string& y_label, const std::vector<Series>& series,
                         double y_min, double y_max) {
  const double width = 640, height = 480;
  const double ml = 70, mr = 150, mt = 40, mb = 50;

  double x_min = 0, x_max = 1;
  bool first = true;
  for (const Series& s : series)
    for (const auto& [x, y] : s.points) {
      if (first) {
        x_min = x_max = x;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  if (x_max <= x_min) x_max = x_min + 1.0;
  if (y_max <= y_min) y_max = y_min + 1.0;

  auto px = [&](double x) { return ml + (x - x_min) / (x_max - x_min) * (width - ml - mr); };
  auto py = [&](double y) { return height - mb - (y - y_min) / (y_max - y_min) * (height - mt - mb); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Axes with 5 ticks each.
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
      << height - mb << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
      << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = x_min + (x_max - x_min) * i / 5.0;
    const double yv = y_min + (y_max - y_min) * i / 5.0;
    svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << height - mb + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(xv) << "</text>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(py(yv) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(yv) << "</text>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << width - mr
        << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"#dddddd\"/>\n";
  }
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
      << x_label << "</text>\n";
  svg << "<text x=\"18\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 " << (mt + height - mb) / 2 << ")\">"
      << y_label << "</text>\n";

  int li = 0;
  for (const Series& s : series) {
    svg << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : s.points) svg << fmt(px(x)) << "," << fmt(py(std::clamp(y, y_min, y_max))) << " ";
    svg << "\"/>\n";
    for (const auto& [x, y] : s.points)
      svg << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(std::clamp(y, y_min, y_max)))
          << "\" r=\"3\" fill=\"" << s.color << "\"/>\n";
    const double ly = mt + 16 + 18 * li++;
    svg << "<line x1=\"" << width - mr + 10 << "\" y1=\"" << ly << "\" x2=\""
        << width - mr + 34 << "\" y2=\"" << ly << "\" stroke=\"" << s.color
        << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << width - mr + 40 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};

std::string snr_label(double snr) {
  if (std::isinf(snr)) return "noiseless";
  std::ostringstream ss;
  ss << fmt(snr) << " dB";
  return ss.str();
}

std::vector<double> sorted_unique_angles(const ResultsTable& t) {
  std::set<double> s;
  for (const ResultRow& r : t.rows) s.insert(r.angle_deg);
  return {s.begin(), s.end()};
}

std::vector<double> sorted_unique_snrs(const ResultsTable& t) {
  std::set<double> s;
  for (const ResultRow& r : t.rows) s.insert(r.snr_db);
  return {s.begin(), s.end()};
}

std::vector<Series> hitrate_series(const ResultsTable& table, const std::string& method,
                                   bool window) {
  std::vector<Series> out;
  const auto angles = sorted_unique_angles(table);
  int ci = 0;
  for (double snr : sorted_unique_snrs(table)) {
    Series s;
    s.label = "SNR " + snr_label(snr);
    s.color = kPalette[ci++ % 8];
    for (double a : angles)
      s.points.emplace_back(a, mean_hitrate(table, method, a, snr, window));
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

std::vector<std::string> emit_plots(const ResultsTable& table, const std::string& out_dir) {
  if (table.rows.empty()) throw std::invalid_argument("emit_plots: empty results table");
  const std::string exp = table.rows.front().experiment;

  std::vector<std::pair<std::string, std::string>> files;  // (name, content)

  if (exp == "exp1") {
    std::map<std::string, Series> dist, mse;
    dist["baseline"] = {"baseline", kPalette[0], {}};
    dist["proposed"] = {"proposed", kPalette[1], {}};
    mse["baseline"] = {"baseline", kPalette[0], {}};
    mse["proposed"] = {"proposed", kPalette[1], {}};
    std::vector<ResultRow> rows = table.rows;
    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
      return a.floor_distance < b.floor_distance;
    });
    double r_max = 0.0;
    for (const ResultRow& r : rows) {
      if (!std::isnan(r.detected_r)) {
        dist[r.method].points.emplace_back(r.floor_distance, r.detected_r);
        r_max = std::max(r_max, r.detected_r);
      }
      mse[r.method].points.emplace_back(r.floor_distance, r.normal_mse);
    }
    files.emplace_back(
        "exp1_detected_distance.svg",
        render_chart("Detected image-source distance vs floor distance",
                     "floor distance d_f [m]", "detected R [m]",
                     {dist["baseline"], dist["proposed"]}, 0.0, std::max(1.2, r_max * 1.1)));
    files.emplace_back(
        "exp1_normal_mse.svg",
        render_chart("Normal MSE vs floor distance", "floor distance d_f [m]",
                     "normal MSE", {mse["baseline"], mse["proposed"]}, 0.0, 1.5));
  } else {
    for (const std::string& method : {"baseline", "proposed"}) {
      files.emplace_back(
          exp + "_wall_hitrate_" + method + ".svg",
          render_chart("Wall hitrate, " + method + " method", "wall angle [deg]",
                       "mean hitrate", hitrate_series(table, method, false), 0.0, 1.0));
    }
    if (exp == "exp3") {
      for (const std::string& method : {"baseline", "proposed"}) {
        files.emplace_back(
            exp + "_window_hitrate_" + method + ".svg",
            render_chart("Window hitrate, " + method + " method", "wall angle [deg]",
                         "mean hitrate", hitrate_series(table, method, true), 0.0, 1.0));
      }
    }
  }

  fs::create_directories(out_dir);

  // Stage everything through temp files; publish only if all writes succeed.
  std::vector<std::pair<fs::path, fs::path>> staged;
  auto cleanup = [&] {
    for (const auto& [tmp, final_] : staged) {
      std::error_code ec;
      fs::remove(tmp, ec);
    }
  };
  try {
    const fs::path dir(out_dir);
    {
      const fs::path tmp = dir / (exp + "_results.csv.tmp");
      write_results_csv(table, tmp.string());
      staged.emplace_back(tmp, dir / (exp + "_results.csv"));
    }
    for (const auto& [name, content] : files) {
      const fs::path tmp = dir / (name + ".tmp");
      std::FILE* f = std::fopen(tmp.c_str(), "w");
      if (!f) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
      const std::size_t n = std::fwrite(content.data(), 1, content.size(), f);
      std::fclose(f);
      if (n != content.size()) throw std::runtime_error("short write to " + tmp.string());
      staged.emplace_back(tmp, dir / name);
    }
  } catch (...) {
    cleanup();
    throw;
  }

  std::vector<std::string> written;
  for (const auto& [tmp, final_] : staged) {
    fs::rename(tmp, final_);
    written.push_back(final_.string());
  }
  return written;
}

}  // namespace echowall
