#include "gdl/density/point_set.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "gdl/errors.hpp"

namespace gdl {
namespace {

double angular_distance(double a, double b) {
  const double d = std::abs(a - b);
  return std::min(d, kTwoPi - d);
}

bool log_r_less(const LogPolarPoint& p, double log_r) { return p.log_r < log_r; }

// Searches a sorted range for a point matching `q` within kPointTolerance.
bool find_near(std::span<const LogPolarPoint> sorted, const LogPolarPoint& q) {
  if (q.is_origin()) return !sorted.empty() && sorted.front().is_origin();
  auto it = std::lower_bound(sorted.begin(), sorted.end(), q.log_r - kPointTolerance, log_r_less);
  while (it != sorted.end() && it->log_r <= q.log_r + kPointTolerance) {
    // Block of identical log_r, sorted by phi.
    const double block_r = it->log_r;
    auto block_end = std::find_if(it, sorted.end(), [&](const auto& p) { return p.log_r != block_r; });
    auto pos = std::lower_bound(it, block_end, q.phi,
                                [](const LogPolarPoint& p, double phi) { return p.phi < phi; });
    auto check = [&](auto cand) { return cand != block_end && angular_distance(cand->phi, q.phi) <= kPointTolerance; };
    if (check(pos)) return true;
    if (pos != it && check(std::prev(pos))) return true;
    if (check(it) || check(std::prev(block_end))) return true;
    it = block_end;
  }
  return false;
}

}  // namespace

double canonical_angle(double phi) {
  double out = std::fmod(phi, kTwoPi);
  if (out < 0) out += kTwoPi;
  if (out >= kTwoPi) out = 0.0;
  return out;
}

LogPolarPoint LogPolarPoint::make(double log_r, double phi) {
  if (std::isnan(log_r) || std::isnan(phi)) throw DomainError("LogPolarPoint: NaN coordinate");
  if (log_r == -std::numeric_limits<double>::infinity()) return origin();
  return {log_r, canonical_angle(phi)};
}

LogPolarPoint LogPolarPoint::from_complex(std::complex<double> z) {
  if (z == 0.0) return origin();
  return make(std::log(std::abs(z)), std::arg(z));
}

LogPolarPoint LogPolarPoint::origin() { return {-std::numeric_limits<double>::infinity(), 0.0}; }

bool LogPolarPoint::is_origin() const { return log_r == -std::numeric_limits<double>::infinity(); }

std::complex<double> LogPolarPoint::to_complex() const {
  if (is_origin()) return {0.0, 0.0};
  return std::polar(std::exp(log_r), phi);
}

LogPolarPoint LogPolarPoint::rotated(double angle) const {
  if (is_origin()) return *this;
  return make(log_r, phi + angle);
}

bool same_point(const LogPolarPoint& a, const LogPolarPoint& b) {
  if (a.is_origin() || b.is_origin()) return a.is_origin() && b.is_origin();
  return std::abs(a.log_r - b.log_r) <= kPointTolerance && angular_distance(a.phi, b.phi) <= kPointTolerance;
}

PointSet::PointSet(std::vector<LogPolarPoint> points, std::string label)
    : points_(std::move(points)), label_(std::move(label)) {
  for (auto& p : points_) p = LogPolarPoint::make(p.log_r, p.phi);
  std::sort(points_.begin(), points_.end());
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (same_point(points_[i - 1], points_[i])) {
      throw AlreadyPresent("PointSet: repeated point");
    }
  }
  // Wrap-around at phi = 0 within a circle.
  for (std::size_t i = 0; i < points_.size();) {
    std::size_t j = i;
    while (j + 1 < points_.size() && points_[j + 1].log_r == points_[i].log_r) ++j;
    if (j > i && same_point(points_[i], points_[j])) throw AlreadyPresent("PointSet: repeated point");
    i = j + 1;
  }
}

bool PointSet::contains(const LogPolarPoint& p) const { return find_near(points_, p); }

void write_point_set_csv(std::ostream& out, const PointSet& set) {
  out << "log_r,phi\n";
  char buf[64];
  for (const auto& p : set.points()) {
    if (p.is_origin()) {
      std::snprintf(buf, sizeof buf, "-inf,%.17g\n", p.phi);
    } else {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.log_r, p.phi);
    }
    out << buf;
  }
}

PointSet read_point_set_csv(std::istream& in, std::string label) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("point set CSV: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "log_r,phi") throw ParseError("point set CSV: expected header 'log_r,phi'");
  std::vector<LogPolarPoint> points;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError("point set CSV: row " + std::to_string(row) + " lacks a comma");
    char* end = nullptr;
    const std::string a = line.substr(0, comma);
    const std::string b = line.substr(comma + 1);
    const double log_r = std::strtod(a.c_str(), &end);
    if (end == a.c_str()) throw ParseError("point set CSV: bad log_r on row " + std::to_string(row));
    const double phi = std::strtod(b.c_str(), &end);
    if (end == b.c_str()) throw ParseError("point set CSV: bad phi on row " + std::to_string(row));
    points.push_back(LogPolarPoint::make(log_r, phi));
  }
  return PointSet(std::move(points), std::move(label));
}

}  // namespace gdl
