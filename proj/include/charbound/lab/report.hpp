#pragma once

// CSV/SVG emission and the log2 least-squares fit used on sweep output.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace charbound::lab {

inline std::string fmt_real(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

inline std::string fmt_real(const std::optional<double>& x) { return x ? fmt_real(*x) : std::string(); }

inline std::string fmt_int(unsigned long long x) { return std::to_string(x); }

inline std::string fmt_bool(bool b) { return b ? "1" : "0"; }

inline std::string csv_join(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += cells[i];
    }
    return out;
}

/// Header plus one line per record; LF endings.
template <typename Record>
std::string to_csv(const std::vector<Record>& records, bool timing) {
    std::string out = csv_join(Record::columns(timing)) + "\n";
    for (const auto& r : records) out += csv_join(r.cells(timing)) + "\n";
    return out;
}

struct Fit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

/// Least squares of log2(y) on x.
inline Fit fit_exponent(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("fit_exponent: x and y differ in length");
    if (x.size() < 3) throw std::invalid_argument("fit_exponent: need at least 3 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    std::vector<double> ly(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(y[i] > 0.0)) throw std::invalid_argument("fit_exponent: y must be positive");
        ly[i] = std::log2(y[i]);
        mx += x[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    if (sxx <= 1e-300) throw std::invalid_argument("fit_exponent: x has no variance");
    Fit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = ly[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r2 = syy <= 1e-300 ? 1.0 : 1.0 - sse / syy;
    return f;
}

/// Single-series line chart with a log2 y axis.
inline std::string svg_line_chart(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                                  const std::vector<double>& x, const std::vector<double>& y) {
    constexpr double W = 640, H = 400, L = 70, R = 20, T = 40, B = 50;
    std::ostringstream s;
    s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
      << W << ' ' << H << "\">\n";
    s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">"
      << title << "</text>\n";
    std::vector<double> px, py;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
        if (y[i] > 0.0 && std::isfinite(y[i])) {
            px.push_back(x[i]);
            py.push_back(std::log2(y[i]));
        }
    if (px.empty()) {
        s << "</svg>\n";
        return s.str();
    }
    double x0 = *std::min_element(px.begin(), px.end()), x1 = *std::max_element(px.begin(), px.end());
    double y0 = std::floor(*std::min_element(py.begin(), py.end()));
    double y1 = std::ceil(*std::max_element(py.begin(), py.end()));
    if (x1 == x0) x1 = x0 + 1;
    if (y1 == y0) y1 = y0 + 1;
    auto sx = [&](double v) { return L + (v - x0) / (x1 - x0) * (W - L - R); };
    auto sy = [&](double v) { return H - B - (v - y0) / (y1 - y0) * (H - T - B); };

    s << "<g stroke=\"#444\" stroke-width=\"1\">\n";
    s << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\"/>\n";
    s << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\"/>\n</g>\n";
    s << "<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#222\">\n";
    const int ysteps = static_cast<int>(std::min(10.0, y1 - y0));
    for (int i = 0; i <= ysteps; ++i) {
        const double v = y0 + (y1 - y0) * i / ysteps;
        s << "<text x=\"" << L - 6 << "\" y=\"" << sy(v) + 4 << "\" text-anchor=\"end\">2^" << fmt_real(v)
          << "</text>\n";
    }
    for (double v : px)
        s << "<text x=\"" << sx(v) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << fmt_real(v)
          << "</text>\n";
    s << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
      << "</text>\n";
    s << "<text x=\"16\" y=\"" << (T + H - B) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
      << (T + H - B) / 2 << ")\">log2 " << ylabel << "</text>\n</g>\n";
    s << "<polyline fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < px.size(); ++i) s << (i ? " " : "") << sx(px[i]) << ',' << sy(py[i]);
    s << "\"/>\n";
    for (std::size_t i = 0; i < px.size(); ++i)
        s << "<circle cx=\"" << sx(px[i]) << "\" cy=\"" << sy(py[i]) << "\" r=\"3\" fill=\"#1f5fa8\"/>\n";
    s << "</svg>\n";
    return s.str();
}

}  // namespace charbound::lab
