#include "hadp/trajectory_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hadp {

namespace {

std::string idx(int a) { return std::to_string(a + 1); }

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("trajectory CSV: " + what);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) malformed("bad number '" + s + "'");
  return v;
}

/// Parses "<prefix>_a_b" style names into their 1-based integer suffixes.
bool suffixes(const std::string& name, const std::string& prefix, std::vector<int>& out) {
  if (name.rfind(prefix + "_", 0) != 0) return false;
  out.clear();
  std::stringstream rest(name.substr(prefix.size() + 1));
  std::string part;
  while (std::getline(rest, part, '_')) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc() || ptr != part.data() + part.size() || v < 1) return false;
    out.push_back(v);
  }
  return !out.empty();
}

TrajectoryLayout layout_from_header(const std::vector<std::string>& cols) {
  TrajectoryLayout l;
  std::map<int, int> m;
  std::map<int, int> kappa;
  int e_count = 0;
  std::vector<int> s;
  for (const std::string& c : cols) {
    if (suffixes(c, "x", s) && s.size() == 1) {
      l.n = std::max(l.n, s[0]);
    } else if (suffixes(c, "u", s) && s.size() == 2) {
      m[s[0]] = std::max(m[s[0]], s[1]);
    } else if (suffixes(c, "nu", s) && s.size() == 1) {
      l.alpha = std::max(l.alpha, s[0]);
    } else if (suffixes(c, "omega_applied", s) && s.size() == 1) {
      l.w = std::max(l.w, s[0]);
    } else if (suffixes(c, "e", s) && s.size() == 1) {
      e_count = std::max(e_count, s[0]);
    } else if (suffixes(c, "Wv", s) && s.size() == 2) {
      kappa[s[0]] = std::max(kappa[s[0]], s[1]);
    } else if (suffixes(c, "Wnu", s) && s.size() == 2) {
      l.mu = std::max(l.mu, s[0]);
    }
  }
  for (const auto& [j, dim] : m) {
    if (j != static_cast<int>(l.m.size()) + 1) malformed("non-contiguous control columns");
    l.m.push_back(dim);
  }
  for (const auto& [i, k] : kappa) {
    if (i != static_cast<int>(l.kappa.size()) + 1) malformed("non-contiguous weight columns");
    l.kappa.push_back(k);
  }
  if (e_count != static_cast<int>(l.kappa.size()) || e_count != l.followers() + 1)
    malformed("inconsistent player count in header");
  if (csv_header(l) != cols) malformed("header does not match the frozen column layout");
  return l;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

std::vector<std::string> csv_header(const TrajectoryLayout& l) {
  const int N = l.followers();
  std::vector<std::string> h{"t"};
  for (int k = 0; k < l.n; ++k) h.push_back("x_" + idx(k));
  for (int j = 0; j < N; ++j)
    for (int k = 0; k < l.m[j]; ++k) h.push_back("u_" + idx(j) + "_" + idx(k));
  for (int k = 0; k < l.alpha; ++k) h.push_back("nu_" + idx(k));
  for (int k = 0; k < l.w; ++k) h.push_back("omega_applied_" + idx(k));
  for (int i = 0; i <= N; ++i) h.push_back("e_" + idx(i));
  h.push_back("e_nu_norm");
  for (int i = 0; i <= N; ++i)
    for (int k = 0; k < l.kappa[i]; ++k) h.push_back("Wv_" + idx(i) + "_" + idx(k));
  for (int i = 0; i <= N; ++i)
    for (int k = 0; k < l.kappa[i]; ++k) h.push_back("Wa_" + idx(i) + "_" + idx(k));
  for (int r = 0; r < l.mu; ++r)
    for (int c = 0; c < l.alpha; ++c) h.push_back("Wnu_" + idx(r) + "_" + idx(c));
  h.push_back("fp_iters");
  for (int i = 0; i <= N; ++i)
    for (int k = 0; k < l.w; ++k) h.push_back("omegahat_" + idx(i) + "_" + idx(k));
  return h;
}

void write_trajectory(const Trajectory& traj, std::ostream& out) {
  const TrajectoryLayout& l = traj.layout;
  const auto header = csv_header(l);
  for (std::size_t k = 0; k < header.size(); ++k) out << (k ? "," : "") << header[k];
  out << '\n';
  std::string line;
  auto put = [&line](double v) {
    line += ',';
    line += format_double(v);
  };
  auto put_vec = [&put](const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) put(v(k));
  };
  for (const TrajectoryRow& r : traj.rows) {
    line = format_double(r.t);
    put_vec(r.x);
    for (const Vector& u : r.u) put_vec(u);
    put_vec(r.nu);
    put_vec(r.omega_applied);
    for (double e : r.e) put(e);
    put(r.e_nu_norm);
    for (const Vector& v : r.Wv) put_vec(v);
    for (const Vector& v : r.Wa) put_vec(v);
    for (Eigen::Index a = 0; a < r.Wnu.rows(); ++a)
      for (Eigen::Index b = 0; b < r.Wnu.cols(); ++b) put(r.Wnu(a, b));
    line += ',';
    line += std::to_string(r.fp_iters);
    for (const Vector& v : r.omega_hat) put_vec(v);
    out << line << '\n';
  }
}

void write_trajectory(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  write_trajectory(traj, out);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

Trajectory read_trajectory(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) malformed("missing header");
  Trajectory traj;
  const auto cols = split(line);
  traj.layout = layout_from_header(cols);
  const TrajectoryLayout& l = traj.layout;
  const int N = l.followers();
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split(line);
    if (f.size() != cols.size()) malformed("row has " + std::to_string(f.size()) + " fields");
    std::size_t at = 0;
    auto next = [&]() { return parse_double(f[at++]); };
    auto vec = [&](int d) {
      Vector v(d);
      for (int k = 0; k < d; ++k) v(k) = next();
      return v;
    };
    TrajectoryRow r;
    r.t = next();
    r.x = vec(l.n);
    for (int j = 0; j < N; ++j) r.u.push_back(vec(l.m[j]));
    r.nu = vec(l.alpha);
    r.omega_applied = vec(l.w);
    for (int i = 0; i <= N; ++i) r.e.push_back(next());
    r.e_nu_norm = next();
    for (int i = 0; i <= N; ++i) r.Wv.push_back(vec(l.kappa[i]));
    for (int i = 0; i <= N; ++i) r.Wa.push_back(vec(l.kappa[i]));
    r.Wnu.resize(l.mu, l.alpha);
    for (int a = 0; a < l.mu; ++a)
      for (int b = 0; b < l.alpha; ++b) r.Wnu(a, b) = next();
    const std::string& fp = f[at++];
    const auto [ptr, ec] = std::from_chars(fp.data(), fp.data() + fp.size(), r.fp_iters);
    if (ec != std::errc() || ptr != fp.data() + fp.size()) malformed("bad fp_iters '" + fp + "'");
    for (int i = 0; i <= N; ++i) r.omega_hat.push_back(vec(l.w));
    traj.rows.push_back(std::move(r));
  }
  return traj;
}

Trajectory read_trajectory(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_trajectory(in);
}

}  // namespace hadp
