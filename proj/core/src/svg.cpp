#include "epmotion/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "epmotion/io.hpp"

namespace epmotion {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string fmt(double x) {
  std::ostringstream out;
  out << std::setprecision(6) << x;
  return out.str();
}

// One drawing area with data-space -> pixel-space mapping and basic axes.
class Panel {
 public:
  Panel(double x0, double y0, double width, double height)
      : px0_(x0), py0_(y0), pw_(width), ph_(height) {}

  void include(double x, double y) {
    xmin_ = std::min(xmin_, x);
    xmax_ = std::max(xmax_, x);
    ymin_ = std::min(ymin_, y);
    ymax_ = std::max(ymax_, y);
  }

  void finalize() {
    if (!(xmax_ > xmin_)) {
      xmin_ -= 0.5;
      xmax_ += 0.5;
    }
    if (!(ymax_ > ymin_)) {
      ymin_ -= 0.5;
      ymax_ += 0.5;
    }
    const double mx = 0.05 * (xmax_ - xmin_);
    const double my = 0.05 * (ymax_ - ymin_);
    xmin_ -= mx;
    xmax_ += mx;
    ymin_ -= my;
    ymax_ += my;
  }

  double px(double x) const {
    return px0_ + (x - xmin_) / (xmax_ - xmin_) * pw_;
  }
  double py(double y) const {
    return py0_ + ph_ - (y - ymin_) / (ymax_ - ymin_) * ph_;
  }

  void frame(std::ostream& out, const std::string& title,
             const std::string& xlabel, const std::string& ylabel) const {
    out << "<rect x=\"" << fmt(px0_) << "\" y=\"" << fmt(py0_) << "\" width=\""
        << fmt(pw_) << "\" height=\"" << fmt(ph_)
        << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << fmt(px0_ + pw_ / 2) << "\" y=\"" << fmt(py0_ - 8)
        << "\" text-anchor=\"middle\" font-size=\"13\" font-family=\"sans-serif\">"
        << title << "</text>\n";
    out << "<text x=\"" << fmt(px0_ + pw_ / 2) << "\" y=\""
        << fmt(py0_ + ph_ + 28)
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">"
        << xlabel << "</text>\n";
    out << "<text x=\"" << fmt(px0_ - 34) << "\" y=\"" << fmt(py0_ + ph_ / 2)
        << "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\""
        << " transform=\"rotate(-90 " << fmt(px0_ - 34) << " "
        << fmt(py0_ + ph_ / 2) << ")\">" << ylabel << "</text>\n";
    // Corner tick labels are enough for desk-scale figures.
    out << "<text x=\"" << fmt(px0_) << "\" y=\"" << fmt(py0_ + ph_ + 14)
        << "\" font-size=\"10\" font-family=\"sans-serif\">" << fmt(xmin_)
        << "</text>\n";
    out << "<text x=\"" << fmt(px0_ + pw_) << "\" y=\"" << fmt(py0_ + ph_ + 14)
        << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
        << fmt(xmax_) << "</text>\n";
    out << "<text x=\"" << fmt(px0_ - 4) << "\" y=\"" << fmt(py0_ + ph_)
        << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
        << fmt(ymin_) << "</text>\n";
    out << "<text x=\"" << fmt(px0_ - 4) << "\" y=\"" << fmt(py0_ + 10)
        << "\" text-anchor=\"end\" font-size=\"10\" font-family=\"sans-serif\">"
        << fmt(ymax_) << "</text>\n";
  }

  void polyline(std::ostream& out, const std::vector<double>& xs,
                const std::vector<double>& ys, const std::string& color,
                double width, const std::string& dash = "") const {
    if (xs.size() < 2) return;
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"" << fmt(width) << "\"";
    if (!dash.empty()) out << " stroke-dasharray=\"" << dash << "\"";
    out << " points=\"";
    for (size_t k = 0; k < xs.size(); ++k) {
      if (k) out << ' ';
      out << fmt(px(xs[k])) << ',' << fmt(py(ys[k]));
    }
    out << "\"/>\n";
  }

  void circle(std::ostream& out, double x, double y, double r,
              const std::string& color, bool filled) const {
    out << "<circle cx=\"" << fmt(px(x)) << "\" cy=\"" << fmt(py(y))
        << "\" r=\"" << fmt(r) << "\" stroke=\"" << color << "\" fill=\""
        << (filled ? color : std::string("none")) << "\"/>\n";
  }

 private:
  double px0_, py0_, pw_, ph_;
  double xmin_ = std::numeric_limits<double>::max();
  double xmax_ = std::numeric_limits<double>::lowest();
  double ymin_ = std::numeric_limits<double>::max();
  double ymax_ = std::numeric_limits<double>::lowest();
};

std::ofstream open_svg(const std::string& path, double width, double height,
                       std::string* header) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  std::ostringstream head;
  head << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(width)
       << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width)
       << " " << fmt(height) << "\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  *header = head.str();
  return out;
}

// Reorder column l+1 so each line continues to its nearest neighbor.
std::vector<std::vector<Complex>> matched_lines(
    const std::vector<CVector>& columns) {
  const size_t cols = columns.size();
  const Eigen::Index dim = columns.empty() ? 0 : columns[0].size();
  std::vector<std::vector<Complex>> lines(dim);
  if (cols == 0) return lines;
  std::vector<Complex> current(columns[0].data(), columns[0].data() + dim);
  for (Eigen::Index k = 0; k < dim; ++k) lines[k].push_back(current[k]);
  for (size_t l = 1; l < cols; ++l) {
    std::vector<bool> used(dim, false);
    std::vector<Complex> next(dim);
    for (Eigen::Index k = 0; k < dim; ++k) {
      Eigen::Index best = -1;
      double best_d = std::numeric_limits<double>::max();
      for (Eigen::Index j = 0; j < dim; ++j) {
        if (used[j]) continue;
        const double d = std::abs(columns[l][j] - current[k]);
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      used[best] = true;
      next[k] = columns[l][best];
    }
    current = next;
    for (Eigen::Index k = 0; k < dim; ++k) lines[k].push_back(current[k]);
  }
  return lines;
}

}  // namespace

void plot_sweep_panels(const SpectrumSweep& sweep, const std::string& path) {
  const int panels = static_cast<int>(sweep.delta_values.size());
  const double pw = 320, ph = 260, gap = 70, margin = 60;
  const int per_row = std::max(1, std::min(panels, 3));
  const int rows = (panels + per_row - 1) / per_row;
  const double width = margin + per_row * (pw + gap);
  const double height = margin + rows * (ph + gap);
  std::string header;
  std::ofstream out = open_svg(path, width, height, &header);
  out << header;

  for (int d = 0; d < panels; ++d) {
    const double x0 = margin + (d % per_row) * (pw + gap);
    const double y0 = margin + (d / per_row) * (ph + gap);
    Panel panel(x0, y0, pw, ph);
    const auto lines = matched_lines(sweep.energies[d]);
    for (const auto& line : lines) {
      for (size_t l = 0; l < line.size(); ++l) {
        panel.include(sweep.lambda_values[l], line[l].real());
      }
    }
    panel.finalize();
    std::ostringstream title;
    title << "Re E vs lambda, delta=" << fmt(sweep.delta_values[d]);
    panel.frame(out, title.str(), "lambda", "Re E");
    for (size_t k = 0; k < lines.size(); ++k) {
      std::vector<double> xs, ys;
      xs.reserve(lines[k].size());
      ys.reserve(lines[k].size());
      for (size_t l = 0; l < lines[k].size(); ++l) {
        xs.push_back(sweep.lambda_values[l]);
        ys.push_back(lines[k][l].real());
      }
      panel.polyline(out, xs, ys, kPalette[k % kPaletteSize], 1.2);
    }
  }
  out << "</svg>\n";
}

void plot_crossing_diagram(const HamiltonianFamily& family, double delta_in,
                           double lambda_min, double lambda_max, int points,
                           const std::vector<CrossingMultiplet>& multiplets,
                           const std::string& path) {
  const double pw = 560, ph = 420, margin = 60;
  std::string header;
  std::ofstream out =
      open_svg(path, pw + 2 * margin, ph + 2 * margin, &header);
  out << header;

  std::vector<double> grid(points);
  std::vector<CVector> columns(points);
  for (int g = 0; g < points; ++g) {
    grid[g] = lambda_min + (lambda_max - lambda_min) * g / (points - 1);
    const HermitianEigen eig =
        hermitian_eigensolve(family.eval(grid[g], delta_in));
    columns[g] = eig.values.cast<Complex>();
  }

  Panel panel(margin, margin, pw, ph);
  for (int g = 0; g < points; ++g) {
    for (Eigen::Index k = 0; k < columns[g].size(); ++k) {
      panel.include(grid[g], columns[g][k].real());
    }
  }
  panel.finalize();
  std::ostringstream title;
  title << "Eigenvalue lines at delta=" << fmt(delta_in)
        << " with crossing multiplets";
  panel.frame(out, title.str(), "lambda", "E");

  for (Eigen::Index k = 0; k < columns[0].size(); ++k) {
    std::vector<double> xs, ys;
    for (int g = 0; g < points; ++g) {
      xs.push_back(grid[g]);
      ys.push_back(columns[g][k].real());
    }
    panel.polyline(out, xs, ys, "#888888", 0.8);
  }
  for (const auto& multiplet : multiplets) {
    const int m = static_cast<int>(multiplet.pairs.size());
    const std::string color = m == 1 ? "#1f77b4" : (m == 2 ? "#d62728" : "#2ca02c");
    for (const auto& pair : multiplet.pairs) {
      panel.circle(out, multiplet.lambda_in, pair.energy, 3.0 + m, color,
                   m > 1);
    }
  }
  out << "</svg>\n";
}

void plot_lambda_plane(const std::vector<TrajectoryRecord>& records,
                       const std::vector<int>& cluster_sizes, bool fold_upper,
                       const std::string& path) {
  const double pw = 560, ph = 480, margin = 60;
  std::string header;
  std::ofstream out =
      open_svg(path, pw + 2 * margin, ph + 2 * margin, &header);
  out << header;

  Panel panel(margin, margin, pw, ph);
  auto fold = [fold_upper](Complex z) {
    return (fold_upper && z.imag() < 0.0) ? std::conj(z) : z;
  };
  for (const auto& record : records) {
    for (const auto& sample : record.samples) {
      const Complex z = fold(sample.lambda);
      panel.include(z.real(), z.imag());
    }
  }
  panel.finalize();
  panel.frame(out, "EP paths in the complex lambda plane", "Re lambda",
              "Im lambda");

  for (size_t r = 0; r < records.size(); ++r) {
    const int m = r < cluster_sizes.size() ? cluster_sizes[r] : 1;
    std::vector<double> xs, ys;
    for (const auto& sample : records[r].samples) {
      const Complex z = fold(sample.lambda);
      xs.push_back(z.real());
      ys.push_back(z.imag());
    }
    const std::string color = kPalette[r % kPaletteSize];
    panel.polyline(out, xs, ys, color, m >= 2 ? 2.2 : 1.2,
                   m >= 2 ? "" : "4,3");
    if (!xs.empty()) {
      panel.circle(out, xs.front(), ys.front(), 3.0, color, false);
      panel.circle(out, xs.back(), ys.back(), 3.0, color, true);
    }
  }
  out << "</svg>\n";
}

void plot_energy_plane(const std::vector<TrajectoryRecord>& records,
                       const std::string& path) {
  const double pw = 560, ph = 480, margin = 60;
  std::string header;
  std::ofstream out =
      open_svg(path, pw + 2 * margin, ph + 2 * margin, &header);
  out << header;

  Panel panel(margin, margin, pw, ph);
  for (const auto& record : records) {
    for (const auto& sample : record.samples) {
      for (Eigen::Index m = 0; m < sample.ep_energies.size(); ++m) {
        panel.include(sample.ep_energies[m].real(),
                      sample.ep_energies[m].imag());
      }
    }
  }
  panel.finalize();
  panel.frame(out, "EP energies in the complex plane", "Re E", "Im E");

  int color_index = 0;
  for (const auto& record : records) {
    const Eigen::Index eps =
        record.samples.empty() ? 0 : record.samples.front().ep_energies.size();
    for (Eigen::Index m = 0; m < eps; ++m) {
      std::vector<double> xs, ys;
      for (const auto& sample : record.samples) {
        xs.push_back(sample.ep_energies[m].real());
        ys.push_back(sample.ep_energies[m].imag());
      }
      const std::string color = kPalette[color_index++ % kPaletteSize];
      panel.polyline(out, xs, ys, color, 1.4);
      if (!xs.empty()) {
        panel.circle(out, xs.front(), ys.front(), 3.0, color, false);
        panel.circle(out, xs.back(), ys.back(), 3.0, color, true);
      }
    }
  }
  out << "</svg>\n";
}

}  // namespace epmotion
