#include "mflab/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace mflab {

namespace {

struct Series {
  std::vector<double> x, y;
  const char* color = "#1f4fd8";
  const char* dash = nullptr;  // nullptr = solid
  std::string label;
};

struct Bounds {
  double xmin = 0, xmax = 1, ymin = 0, ymax = 1;
};

Bounds data_bounds(const std::vector<Series>& series) {
  Bounds b;
  b.xmin = b.ymin = std::numeric_limits<double>::infinity();
  b.xmax = b.ymax = -std::numeric_limits<double>::infinity();
  for (const Series& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      b.xmin = std::min(b.xmin, s.x[i]);
      b.xmax = std::max(b.xmax, s.x[i]);
      b.ymin = std::min(b.ymin, s.y[i]);
      b.ymax = std::max(b.ymax, s.y[i]);
    }
  if (!std::isfinite(b.xmin)) b = Bounds{};
  if (b.xmax <= b.xmin) b.xmax = b.xmin + 1.0;
  if (b.ymax <= b.ymin) {
    b.ymin -= 1.0;
    b.ymax += 1.0;
  }
  const double pad = 0.04 * (b.ymax - b.ymin);
  b.ymin -= pad;
  b.ymax += pad;
  return b;
}

double nice_step(double range) {
  const double raw = range / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2.0 * mag;
  if (r < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

class SvgWriter {
 public:
  SvgWriter(int width, int height) : width_(width), height_(height) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
         << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
         << height << "\">\n"
         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  }

  // One framed panel with ticks, series polylines and a legend line.
  void panel(double left, double top, double w, double h,
             const std::string& title, const std::vector<Series>& series,
             const Bounds& b, const std::string& x_label) {
    const int clip = clip_id_++;
    out_ << "<clipPath id=\"c" << clip << "\"><rect x=\"" << left << "\" y=\""
         << top << "\" width=\"" << w << "\" height=\"" << h
         << "\"/></clipPath>\n";
    out_ << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << w
         << "\" height=\"" << h << "\" fill=\"none\" stroke=\"#444\"/>\n";
    text(left, top - 8, title, 13, "#111", false);

    const auto px = [&](double x) {
      return left + (x - b.xmin) / (b.xmax - b.xmin) * w;
    };
    const auto py = [&](double y) {
      return top + (1.0 - (y - b.ymin) / (b.ymax - b.ymin)) * h;
    };

    const double xstep = nice_step(b.xmax - b.xmin);
    for (double x = std::ceil(b.xmin / xstep) * xstep; x <= b.xmax + 1e-9 * xstep;
         x += xstep) {
      out_ << "<line x1=\"" << px(x) << "\" y1=\"" << top + h << "\" x2=\""
           << px(x) << "\" y2=\"" << top + h + 4 << "\" stroke=\"#444\"/>\n";
      text(px(x), top + h + 16, fmt(x), 11, "#333", true);
    }
    const double ystep = nice_step(b.ymax - b.ymin);
    for (double y = std::ceil(b.ymin / ystep) * ystep; y <= b.ymax + 1e-9 * ystep;
         y += ystep) {
      out_ << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\""
           << left - 4 << "\" y2=\"" << py(y) << "\" stroke=\"#444\"/>\n";
      text(left - 7, py(y) + 4, fmt(y), 11, "#333", false, true);
      out_ << "<line x1=\"" << left << "\" y1=\"" << py(y) << "\" x2=\""
           << left + w << "\" y2=\"" << py(y)
           << "\" stroke=\"#ddd\" stroke-width=\"0.5\"/>\n";
    }
    text(left + w / 2, top + h + 32, x_label, 12, "#333", true);

    double legend_x = left + 10;
    for (const Series& s : series) {
      out_ << "<polyline clip-path=\"url(#c" << clip
           << ")\" fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.4\"";
      if (s.dash) out_ << " stroke-dasharray=\"" << s.dash << "\"";
      out_ << " points=\"";
      // Cap the emitted points so long runs stay compact.
      const std::size_t stride = std::max<std::size_t>(1, s.x.size() / 1500);
      for (std::size_t i = 0; i < s.x.size(); i += stride) {
        if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px(s.x[i]), py(s.y[i]));
        out_ << buf;
      }
      out_ << "\"/>\n";
      if (!s.label.empty()) {
        out_ << "<line x1=\"" << legend_x << "\" y1=\"" << top + 12 << "\" x2=\""
             << legend_x + 22 << "\" y2=\"" << top + 12 << "\" stroke=\""
             << s.color << "\" stroke-width=\"1.4\"";
        if (s.dash) out_ << " stroke-dasharray=\"" << s.dash << "\"";
        out_ << "/>\n";
        text(legend_x + 26, top + 16, s.label, 11, "#111", false);
        legend_x += 34 + 7.0 * s.label.size();
      }
    }
    last_panel_ = {left, top, w, h, b};
  }

  void marker_cross(double x, double y) {
    const auto& p = last_panel_;
    const double cx =
        p.left + (x - p.b.xmin) / (p.b.xmax - p.b.xmin) * p.w;
    const double cy =
        p.top + (1.0 - (y - p.b.ymin) / (p.b.ymax - p.b.ymin)) * p.h;
    out_ << "<path d=\"M" << cx - 5 << " " << cy - 5 << " L" << cx + 5 << " "
         << cy + 5 << " M" << cx - 5 << " " << cy + 5 << " L" << cx + 5 << " "
         << cy - 5 << "\" stroke=\"#c22\" stroke-width=\"1.6\"/>\n";
  }

  void save(const std::string& path) {
    out_ << "</svg>\n";
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path);
    file << out_.str();
    if (!file) throw IoError("write failed: " + path);
  }

 private:
  void text(double x, double y, const std::string& s, int size,
            const char* fill, bool centered, bool right = false) {
    out_ << "<text x=\"" << x << "\" y=\"" << y << "\" font-family=\"sans-serif\""
         << " font-size=\"" << size << "\" fill=\"" << fill << "\"";
    if (centered) out_ << " text-anchor=\"middle\"";
    if (right) out_ << " text-anchor=\"end\"";
    out_ << ">" << s << "</text>\n";
  }

  struct PanelGeom {
    double left = 0, top = 0, w = 1, h = 1;
    Bounds b;
  };

  int width_, height_;
  int clip_id_ = 0;
  PanelGeom last_panel_;
  std::ostringstream out_;
};

}  // namespace

void write_time_plot(const RunResult& result, const std::string& path) {
  if (result.trace.empty()) throw ValidationError("empty trace");

  std::vector<double> t, u, sp, ystar, y, ftrue, fest;
  for (const TraceRow& r : result.trace) {
    t.push_back(r.t);
    u.push_back(r.u);
    sp.push_back(r.setpoint);
    ystar.push_back(r.y_star);
    y.push_back(r.y);
    ftrue.push_back(r.f_true);
    fest.push_back(r.f_est);
  }

  SvgWriter svg(860, 760);
  const double left = 64, w = 760, h = 190;

  std::vector<Series> control = {{t, u, "#1f4fd8", nullptr, "u"}};
  svg.panel(left, 36, w, h, "Control", control, data_bounds(control), "t [s]");

  std::vector<Series> tracking = {
      {t, sp, "#111111", "8 3 2 3", "setpoint"},
      {t, ystar, "#c22222", "7 4", "reference"},
      {t, y, "#1f4fd8", nullptr, "output"}};
  svg.panel(left, 286, w, h, "Setpoint, reference and output", tracking,
            data_bounds(tracking), "t [s]");

  std::vector<Series> estimation = {{t, ftrue, "#c22222", "7 4", "F"},
                                    {t, fest, "#1f4fd8", nullptr, "F_est"}};
  svg.panel(left, 536, w, h, "F and F_est", estimation, data_bounds(estimation),
            "t [s]");

  svg.save(path);
}

void write_frequency_plot(const std::vector<NyquistRow>& rows,
                          const std::string& path) {
  if (rows.empty()) throw ValidationError("empty frequency response");

  std::vector<double> logw, re, im, db, ph;
  for (const NyquistRow& r : rows) {
    logw.push_back(std::log10(r.omega));
    re.push_back(r.re);
    im.push_back(r.im);
    db.push_back(r.gain_db);
    ph.push_back(r.phase_deg);
  }

  SvgWriter svg(860, 760);
  const double left = 64, w = 760, h = 190;

  // The locus blows up near omega = 0; window it around the critical point.
  std::vector<Series> nyquist = {{re, im, "#1f4fd8", nullptr, "T(jw)"}};
  Bounds nb = data_bounds(nyquist);
  nb.xmin = std::max(nb.xmin, -10.0);
  nb.xmax = std::min(std::max(nb.xmax, 0.5), 10.0);
  nb.ymin = std::max(nb.ymin, -10.0);
  nb.ymax = std::min(std::max(nb.ymax, 0.5), 10.0);
  nb.xmin = std::min(nb.xmin, -1.5);
  svg.panel(left, 36, w, h, "Nyquist", nyquist, nb, "Re T");
  svg.marker_cross(-1.0, 0.0);

  std::vector<Series> mag = {{logw, db, "#1f4fd8", nullptr, "|T| [dB]"}};
  svg.panel(left, 286, w, h, "Bode magnitude", mag, data_bounds(mag),
            "log10(omega [rad/s])");

  std::vector<Series> phase = {{logw, ph, "#1f4fd8", nullptr, "arg T [deg]"}};
  svg.panel(left, 536, w, h, "Bode phase", phase, data_bounds(phase),
            "log10(omega [rad/s])");

  svg.save(path);
}

}  // namespace mflab
