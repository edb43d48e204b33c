#include "binrec/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace binrec {

namespace {

constexpr double kPlot = 400.0;
constexpr double kLeft = 70.0;
constexpr double kTop = 40.0;
constexpr double kLegendWidth = 20.0;

int gray_level(double rate) { return static_cast<int>(std::lround(255.0 * std::clamp(rate, 0.0, 1.0))); }

std::string fill(double rate) {
  const int g = gray_level(rate);
  std::ostringstream s;
  s << "rgb(" << g << ',' << g << ',' << g << ')';
  return s.str();
}

}  // namespace

std::string heatmap_svg(const PhaseDiagram& d, Program program) {
  const std::size_t p = d.program_index(program);
  const std::size_t nk = d.config.k_fractions.size();
  const std::size_t nm = d.config.m_fractions.size();
  const double cw = nk > 0 ? kPlot / static_cast<double>(nk) : kPlot;
  const double ch = nm > 0 ? kPlot / static_cast<double>(nm) : kPlot;
  const double width = kLeft + kPlot + 100.0;
  const double height = kTop + kPlot + 60.0;

  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
    << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  s << "<title>success rate: " << to_string(program) << "</title>\n";
  s << "<g id=\"cells\" shape-rendering=\"crispEdges\">\n";
  for (std::size_t ki = 0; ki < nk; ++ki) {
    for (std::size_t mj = 0; mj < nm; ++mj) {
      const CellStats& c = d.cell(ki, mj);
      const double rate = static_cast<double>(c.successes[p]) / static_cast<double>(c.trials);
      // m grows upward.
      const double x = kLeft + static_cast<double>(ki) * cw;
      const double y = kTop + kPlot - static_cast<double>(mj + 1) * ch;
      s << "<rect class=\"cell\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
        << "\" fill=\"" << fill(rate) << "\" data-k=\"" << c.k << "\" data-m=\"" << c.m << "\" data-rate=\""
        << rate << "\"/>\n";
    }
  }
  s << "</g>\n";

  s << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << kPlot << "\" height=\"" << kPlot
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double f = 0.25 * i;
    const double x = kLeft + f * kPlot;
    const double y = kTop + kPlot - f * kPlot;
    s << "<text x=\"" << x << "\" y=\"" << kTop + kPlot + 16 << "\" font-size=\"11\" text-anchor=\"middle\">" << f
      << "</text>\n";
    s << "<text x=\"" << kLeft - 6 << "\" y=\"" << y + 4 << "\" font-size=\"11\" text-anchor=\"end\">" << f
      << "</text>\n";
  }
  s << "<text x=\"" << kLeft + kPlot / 2 << "\" y=\"" << kTop + kPlot + 40
    << "\" font-size=\"14\" text-anchor=\"middle\">k/N</text>\n";
  s << "<text x=\"" << kLeft - 40 << "\" y=\"" << kTop + kPlot / 2 << "\" font-size=\"14\" text-anchor=\"middle\""
    << " transform=\"rotate(-90 " << kLeft - 40 << ' ' << kTop + kPlot / 2 << ")\">m/N</text>\n";

  const double lx = kLeft + kPlot + 30.0;
  s << "<g id=\"legend\">\n";
  s << "<defs><linearGradient id=\"scale\" x1=\"0\" y1=\"1\" x2=\"0\" y2=\"0\">"
    << "<stop offset=\"0\" stop-color=\"rgb(0,0,0)\"/><stop offset=\"1\" stop-color=\"rgb(255,255,255)\"/>"
    << "</linearGradient></defs>\n";
  s << "<rect x=\"" << lx << "\" y=\"" << kTop << "\" width=\"" << kLegendWidth << "\" height=\"" << kPlot
    << "\" fill=\"url(#scale)\" stroke=\"black\"/>\n";
  s << "<text x=\"" << lx + kLegendWidth + 4 << "\" y=\"" << kTop + 10 << "\" font-size=\"11\">1</text>\n";
  s << "<text x=\"" << lx + kLegendWidth + 4 << "\" y=\"" << kTop + kPlot << "\" font-size=\"11\">0</text>\n";
  s << "<text x=\"" << lx << "\" y=\"" << kTop - 10 << "\" font-size=\"11\">success</text>\n";
  s << "</g>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace binrec
