#include "hsa/oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hsa/errors.hpp"

namespace hsa {

namespace {

// x(t) = a t^2 + b t + c
struct Quad {
  double a, b, c;
  double operator()(double t) const { return (a * t + b) * t + c; }
};
// v(t) = p t + q
struct Lin {
  double p, q;
  double operator()(double t) const { return p * t + q; }
};

constexpr double kT1 = 2.0;
constexpr double kT2 = 40.0 / 19.0;
constexpr double kT3 = 20.0 / 9.0;

// One time regime of the Eulerian solution: six moving breakpoints,
// four constant plateaus of u interleaved with three sloped pieces
// u = 2 (x - s_i(t)) / (t - r_i), and four energy levels interleaved
// with three parabolic-denominator pieces F = 4 (x + f_i(t)) / (t-r_i)^2.
struct EulRegime {
  std::array<Quad, 6> bp;
  std::array<Lin, 4> u_flat;   // regions 0, 2, 4, 6
  std::array<Lin, 3> u_anchor; // s_i(t) for regions 1, 3, 5
  std::array<double, 4> F_level;
  std::array<Quad, 3> F_shift; // f_i(t) for regions 1, 3, 5
  static constexpr std::array<double, 3> r{kT1, kT2, kT3};
};

const EulRegime kEul1{
    // t in [0, 2)
    {{{-3.0 / 8, 3, 0},
      {-1.0 / 8, 2, 1},
      {-1.0 / 8, 2, 400.0 / 361},
      {1.0 / 8, 18.0 / 19, 800.0 / 361},
      {1.0 / 8, 18.0 / 19, 200.0 / 81},
      {3.0 / 8, -28.0 / 171, 100.0 / 27}}},
    {{{-3.0 / 4, 3}, {-1.0 / 4, 2}, {1.0 / 4, 18.0 / 19}, {3.0 / 4, -28.0 / 171}}},
    {{{3.0 / 4, 3}, {266.0 / 361, 1160.0 / 361}, {257.0 / 342, 5420.0 / 1539}}},
    {0, 1, 2, 3},
    {{{3.0 / 8, -3, 0}, {3.0 / 8, -58.0 / 19, 0}, {3.0 / 8, -542.0 / 171, 0}}}};

const EulRegime kEul2{
    // t in [2, 40/19)
    {{{-5.0 / 16, 11.0 / 4, 1.0 / 4},
      {-3.0 / 16, 9.0 / 4, 3.0 / 4},
      {-3.0 / 16, 9.0 / 4, 1239.0 / 1444},
      {1.0 / 16, 91.0 / 76, 2839.0 / 1444},
      {1.0 / 16, 91.0 / 76, 719.0 / 324},
      {5.0 / 16, 59.0 / 684, 373.0 / 108}}},
    {{{-5.0 / 8, 11.0 / 4},
      {-3.0 / 8, 9.0 / 4},
      {1.0 / 8, 91.0 / 76},
      {5.0 / 8, 59.0 / 684}}},
    {{{3.0 / 4, 3},
      {111.0 / 152, 4659.0 / 1444},
      {1009.0 / 1368, 21851.0 / 6156}}},
    {0, 0.5, 1.5, 2.5},
    {{{5.0 / 16, -11.0 / 4, -1.0 / 4},
      {5.0 / 16, -211.0 / 76, -439.0 / 1444},
      {5.0 / 16, -653.0 / 228, -119.0 / 324}}}};

const EulRegime kEul3{
    // t in [40/19, 20/9)
    {{{-7.0 / 32, 179.0 / 76, 961.0 / 1444},
      {-3.0 / 32, 141.0 / 76, 1683.0 / 1444},
      {-3.0 / 32, 141.0 / 76, 1839.0 / 1444},
      {-1.0 / 32, 121.0 / 76, 2239.0 / 1444},
      {-1.0 / 32, 121.0 / 76, 200.0 / 81 - 961.0 / 1444},
      {7.0 / 32, 329.0 / 684, 100.0 / 27 - 961.0 / 1444}}},
    {{{-7.0 / 16, 179.0 / 76},
      {-3.0 / 16, 141.0 / 76},
      {-1.0 / 16, 121.0 / 76},
      {7.0 / 16, 329.0 / 684}}},
    {{{225.0 / 304, 2181.0 / 722},
      {111.0 / 152, 4659.0 / 1444},
      {497.0 / 684, 417869.0 / 116964}}},
    {0, 0.5, 0.75, 1.75},
    {{{7.0 / 32, -179.0 / 76, -961.0 / 1444},
      {7.0 / 32, -181.0 / 76, -1039.0 / 1444},
      {7.0 / 32, -553.0 / 228, 961.0 / 1444 - 125.0 / 81}}}};

const EulRegime kEul4{
    // t in [20/9, inf)
    {{{-19.0 / 160, 1307.0 / 684, 40.0 / 81 + 961.0 / 1444},
      {1.0 / 160, 965.0 / 684, 40.0 / 81 + 1683.0 / 1444},
      {1.0 / 160, 965.0 / 684, 40.0 / 81 + 1839.0 / 1444},
      {11.0 / 160, 785.0 / 684, 40.0 / 81 + 2239.0 / 1444},
      {11.0 / 160, 785.0 / 684, 134.0 / 27 - 3849.0 / 1444},
      {19.0 / 160, 211.0 / 228, 503.0 / 81 - 5293.0 / 1444}}},
    {{{-19.0 / 80, 1307.0 / 684},
      {1.0 / 80, 965.0 / 684},
      {11.0 / 80, 785.0 / 684},
      {19.0 / 80, 211.0 / 228}}},
    {{{9821.0 / 13680, 40.0 / 81 + 16741.0 / 6498},
      {983.0 / 1368, 40.0 / 81 + 35851.0 / 12996},
      {497.0 / 684, 200.0 / 81 + 14341.0 / 12996}}},
    {0, 0.5, 0.75, 19.0 / 20},
    {{{19.0 / 160, -1307.0 / 684, -40.0 / 81 - 961.0 / 1444},
      {19.0 / 160, -1325.0 / 684, -40.0 / 81 - 1039.0 / 1444},
      {19.0 / 160, -1355.0 / 684, -55.0 / 27 + 961.0 / 1444}}}};

const EulRegime& regime_at(double t) {
  if (t < kT1) return kEul1;
  if (t < kT2) return kEul2;
  if (t < kT3) return kEul3;
  return kEul4;
}

double eval_u_region(const EulRegime& R, int region, double t, double x) {
  if (region % 2 == 0) return R.u_flat[static_cast<std::size_t>(region / 2)](t);
  const std::size_t i = static_cast<std::size_t>(region / 2);
  return 2.0 * (x - R.u_anchor[i](t)) / (t - EulRegime::r[i]);
}

double eval_F_region(const EulRegime& R, int region, double t, double x) {
  if (region % 2 == 0) return R.F_level[static_cast<std::size_t>(region / 2)];
  const std::size_t i = static_cast<std::size_t>(region / 2);
  const double d = t - EulRegime::r[i];
  return 4.0 * (x + R.F_shift[i](t)) / (d * d);
}

}  // namespace

ExactPoint exact_multipeakon(double t, double x) {
  if (t < 0.0) throw config_error("exact_multipeakon: negative time");
  const EulRegime& R = regime_at(t);
  int region = 0;
  while (region < 6 && x > R.bp[static_cast<std::size_t>(region)](t)) ++region;
  return {eval_u_region(R, region, t, x), eval_F_region(R, region, t, x)};
}

std::pair<PiecewiseLinear, MonotoneStep> exact_multipeakon_state(double t) {
  if (t < 0.0) throw config_error("exact_multipeakon_state: negative time");
  const EulRegime& R = regime_at(t);

  std::vector<double> xs, uv, fl, fr;
  for (int i = 0; i < 6; ++i) {
    const double x = R.bp[static_cast<std::size_t>(i)](t);
    if (!xs.empty() && !(x > xs.back())) {
      // coinciding breakpoints: a region of zero width; the right limit
      // belongs to the region after it
      fr.back() = eval_F_region(R, i + 1, t, x);
      continue;
    }
    xs.push_back(x);
    uv.push_back(eval_u_region(R, i, t, x));  // left region; u is continuous
    fl.push_back(eval_F_region(R, i, t, x));
    fr.push_back(eval_F_region(R, i + 1, t, x));
  }
  // the closed forms meet the plateau levels only to rounding; restore
  // monotonicity by a cumulative clamp
  double prev = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fl[i] = std::max(fl[i], prev);
    fr[i] = std::max(fr[i], fl[i]);
    prev = fr[i];
  }
  return {PiecewiseLinear(xs, uv), MonotoneStep(xs, fl, fr)};
}

double exact_multipeakon_F_inf(double t) {
  return regime_at(t).F_level[3];
}

namespace {

// Lagrangian regime tables: per label region, y = ys(t) * xi + yoff(t),
// U = us(t) * xi + uoff(t), V = vs * xi + voff. Sloped regions sit at
// odd indices; H is the t = 0 energy in every regime.
struct LagRegime {
  // y slope factors for odd regions: c (t - r)^2, with unit slope on
  // even regions. U slope factors: cu (t - r).
  std::array<double, 3> y_curv;
  std::array<double, 3> u_curv;
  std::array<Quad, 7> y_off;
  std::array<Lin, 7> u_off;
  std::array<Lin, 7> V;  // value = p * xi + q
};

constexpr std::array<double, 6> kXiNodes{0.0,           2.0,
                                         761.0 / 361.0, 1522.0 / 361.0,
                                         362.0 / 81.0,  181.0 / 27.0};

const LagRegime kLag1{
    {1.0 / 8, 361.0 / 3044, 81.0 / 724},
    {1.0 / 4, 361.0 / 1522, 81.0 / 362},
    {{{-3.0 / 8, 3, 0},
      {-3.0 / 8, 3, 0},
      {-1.0 / 8, 2, -1},
      {-3.0 / 8, 58.0 / 19, 0},
      {1.0 / 8, 18.0 / 19, -2},
      {-3.0 / 8, 542.0 / 171, 0},
      {3.0 / 8, -28.0 / 171, -3}}},
    {{{-3.0 / 4, 3},
      {-3.0 / 4, 3},
      {-1.0 / 4, 2},
      {-3.0 / 4, 58.0 / 19},
      {1.0 / 4, 18.0 / 19},
      {-3.0 / 4, 542.0 / 171},
      {3.0 / 4, -28.0 / 171}}},
    {{{0, 0}, {0.5, 0}, {0, 1}, {361.0 / 761, 0}, {0, 2}, {81.0 / 181, 0}, {0, 3}}}};

const LagRegime kLag2{
    {1.0 / 16, 361.0 / 3044, 81.0 / 724},
    {1.0 / 8, 361.0 / 1522, 81.0 / 362},
    {{{-5.0 / 16, 11.0 / 4, 1.0 / 4},
      {-5.0 / 16, 11.0 / 4, 1.0 / 4},
      {-3.0 / 16, 9.0 / 4, -5.0 / 4},
      {-7.0 / 16, 251.0 / 76, -1.0 / 4},
      {1.0 / 16, 91.0 / 76, -9.0 / 4},
      {-7.0 / 16, 371.0 / 171 + 5.0 / 4, -1.0 / 4},
      {5.0 / 16, 59.0 / 684, -13.0 / 4}}},
    {{{-5.0 / 8, 11.0 / 4},
      {-5.0 / 8, 11.0 / 4},
      {-3.0 / 8, 9.0 / 4},
      {-7.0 / 8, 251.0 / 76},
      {1.0 / 8, 91.0 / 76},
      {-7.0 / 8, 371.0 / 171 + 5.0 / 4},
      {5.0 / 8, 59.0 / 684}}},
    {{{0, 0},
      {0.25, 0},
      {0, 0.5},
      {361.0 / 761, -0.5},
      {0, 1.5},
      {81.0 / 181, -0.5},
      {0, 2.5}}}};

const LagRegime kLag3{
    {1.0 / 16, 361.0 / 12176, 81.0 / 724},
    {1.0 / 8, 361.0 / 6088, 81.0 / 362},
    {{{-7.0 / 32, 179.0 / 76, 961.0 / 1444},
      {-7.0 / 32, 179.0 / 76, 961.0 / 1444},
      {-3.0 / 32, 141.0 / 76, -1205.0 / 1444},
      {-5.0 / 32, 161.0 / 76, 1439.0 / 1444},
      {-1.0 / 32, 121.0 / 76, -3849.0 / 1444},
      {-17.0 / 32, 2609.0 / 684, -961.0 / 1444},
      {7.0 / 32, 329.0 / 684, -5293.0 / 1444}}},
    {{{-7.0 / 16, 179.0 / 76},
      {-7.0 / 16, 179.0 / 76},
      {-3.0 / 16, 141.0 / 76},
      {-5.0 / 16, 161.0 / 76},
      {-1.0 / 16, 121.0 / 76},
      {-17.0 / 16, 2609.0 / 684},
      {7.0 / 16, 329.0 / 684}}},
    {{{0, 0},
      {0.25, 0},
      {0, 0.5},
      {361.0 / 3044, 0.25},
      {0, 0.75},
      {81.0 / 181, -1.25},
      {0, 1.75}}}};

const LagRegime kLag4{
    {1.0 / 16, 361.0 / 12176, 81.0 / 3620},
    {1.0 / 8, 361.0 / 6088, 81.0 / 1810},
    {{{-19.0 / 160, 1307.0 / 684, 40.0 / 81 + 961.0 / 1444},
      {-19.0 / 160, 1307.0 / 684, 40.0 / 81 + 961.0 / 1444},
      {1.0 / 160, 965.0 / 684, 40.0 / 81 - 1205.0 / 1444},
      {-9.0 / 160, 1145.0 / 684, 40.0 / 81 + 1439.0 / 1444},
      {11.0 / 160, 785.0 / 684, 40.0 / 81 - 3849.0 / 1444},
      {-1.0 / 32, 121.0 / 76, 200.0 / 81 - 961.0 / 1444},
      {19.0 / 160, 211.0 / 228, -40.0 / 81 - 5293.0 / 1444}}},
    {{{-19.0 / 80, 1307.0 / 684},
      {-19.0 / 80, 1307.0 / 684},
      {1.0 / 80, 965.0 / 684},
      {-9.0 / 80, 1145.0 / 684},
      {11.0 / 80, 785.0 / 684},
      {-1.0 / 16, 121.0 / 76},
      {19.0 / 80, 211.0 / 228}}},
    {{{0, 0},
      {0.25, 0},
      {0, 0.5},
      {361.0 / 3044, 0.25},
      {0, 0.75},
      {81.0 / 905, 0.35},
      {0, 19.0 / 20}}}};

const LagRegime& lag_regime_at(double t) {
  if (t < kT1) return kLag1;
  if (t < kT2) return kLag2;
  if (t < kT3) return kLag3;
  return kLag4;
}

}  // namespace

ExactLagrangianPoint exact_multipeakon_lagrangian(double t, double xi) {
  if (t < 0.0) throw config_error("exact_multipeakon_lagrangian: negative time");
  const LagRegime& R = lag_regime_at(t);
  int region = 0;
  while (region < 6 && xi > kXiNodes[static_cast<std::size_t>(region)]) ++region;

  double ys = 1.0, us = 0.0;
  if (region % 2 == 1) {
    const std::size_t i = static_cast<std::size_t>(region / 2);
    const double d = t - EulRegime::r[i];
    ys = R.y_curv[i] * d * d;
    us = R.u_curv[i] * d;
  }
  const std::size_t rr = static_cast<std::size_t>(region);
  ExactLagrangianPoint p;
  p.y = ys * xi + R.y_off[rr](t);
  p.U = us * xi + R.u_off[rr](t);
  p.V = R.V[rr].p * xi + R.V[rr].q;
  p.H = kLag1.V[rr].p * xi + kLag1.V[rr].q;  // conserved: the t = 0 energy
  return p;
}

std::vector<BreakingEvent> exact_breaking_locations() {
  return {{2.0, 9.0 / 2.0, 1.0 / 2.0},
          {40.0 / 19.0, 6879.0 / 1444.0, 3.0 / 4.0},
          {20.0 / 9.0, 6005.0 / 1026.0 - 961.0 / 1444.0, 4.0 / 5.0}};
}

namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t hash_doubles(std::uint64_t h, const std::vector<double>& v) {
  return fnv1a(h, v.data(), v.size() * sizeof(double));
}

std::uint64_t hash_step(std::uint64_t h, const MonotoneStep& m) {
  h = hash_doubles(h, m.nodes());
  h = hash_doubles(h, m.left_values());
  return hash_doubles(h, m.right_values());
}

constexpr int kCacheFormat = 1;

void write_doubles(std::ostream& os, const std::vector<double>& v) {
  os << v.size();
  char buf[40];
  for (double x : v) {
    std::snprintf(buf, sizeof buf, " %a", x);
    os << buf;
  }
  os << "\n";
}

bool read_doubles(std::istream& is, std::vector<double>& v) {
  std::size_t n = 0;
  if (!(is >> n)) return false;
  v.resize(n);
  std::string tok;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(is >> tok)) return false;
    v[i] = std::strtod(tok.c_str(), nullptr);
  }
  return true;
}

void write_step(std::ostream& os, const MonotoneStep& m) {
  write_doubles(os, m.nodes());
  write_doubles(os, m.left_values());
  write_doubles(os, m.right_values());
}

bool read_step(std::istream& is, MonotoneStep& out) {
  std::vector<double> n, l, r;
  if (!read_doubles(is, n) || !read_doubles(is, l) || !read_doubles(is, r))
    return false;
  out = MonotoneStep(std::move(n), std::move(l), std::move(r));
  return true;
}

}  // namespace

FineReference fine_reference(const EulerianState& state0,
                             const AlphaProfile& alpha, double dx_ref,
                             double T, std::vector<double> query_times,
                             const std::string& cache_dir) {
  std::sort(query_times.begin(), query_times.end());
  query_times.erase(std::unique(query_times.begin(), query_times.end()),
                    query_times.end());

  std::uint64_t h = 1469598103934665603ULL;
  const int fmt = kCacheFormat;
  h = fnv1a(h, &fmt, sizeof fmt);
  h = fnv1a(h, &dx_ref, sizeof dx_ref);
  h = fnv1a(h, &T, sizeof T);
  h = hash_doubles(h, query_times);
  h = hash_doubles(h, state0.u.nodes());
  h = hash_doubles(h, state0.u.values());
  h = hash_step(h, state0.F_ac);
  h = hash_step(h, state0.F_sing);
  h = hash_step(h, state0.G);
  h = hash_doubles(h, alpha.profile().nodes());
  h = hash_doubles(h, alpha.profile().values());

  std::filesystem::path cache_file;
  if (!cache_dir.empty()) {
    std::ostringstream name;
    name << "ref_" << std::hex << h << ".txt";
    cache_file = std::filesystem::path(cache_dir) / name.str();
    std::ifstream is(cache_file);
    if (is) {
      FineReference ref;
      int fmt_in = 0;
      std::uint64_t h_in = 0;
      std::string dx_tok, T_tok;
      is >> fmt_in >> h_in >> dx_tok >> T_tok;
      ref.dx_ref = std::strtod(dx_tok.c_str(), nullptr);
      ref.T = std::strtod(T_tok.c_str(), nullptr);
      std::size_t n_times = 0;
      is >> n_times;
      if (is && fmt_in == kCacheFormat && h_in == h) {
        bool ok = read_doubles(is, ref.times) && ref.times.size() == n_times;
        for (std::size_t i = 0; ok && i < n_times; ++i) {
          std::vector<double> un, uv;
          MonotoneStep fac = MonotoneStep::zero(), fs = MonotoneStep::zero(),
                       g = MonotoneStep::zero();
          ok = read_doubles(is, un) && read_doubles(is, uv) &&
               read_step(is, fac) && read_step(is, fs) && read_step(is, g);
          if (ok) {
            EulerianState s{PiecewiseLinear(std::move(un), std::move(uv)),
                            std::move(fac), std::move(fs), std::move(g), 0, 0};
            s.F_inf = s.F_ac.total() + s.F_sing.total();
            s.G_inf = s.G.total();
            ref.states.push_back(std::move(s));
          }
        }
        if (ok) return ref;
      }
      // stale or unreadable cache entry: fall through and recompute
    }
  }

  EvolutionConfig cfg;
  cfg.collect_checks = false;
  SolveResult run = solve(state0, alpha, dx_ref, T, cfg, query_times);

  FineReference ref;
  ref.dx_ref = dx_ref;
  ref.T = T;
  for (auto& snap : run.snapshots) {
    ref.times.push_back(snap.t);
    ref.states.push_back(std::move(snap.eulerian));
  }

  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_dir);
    const std::filesystem::path tmp = cache_file.string() + ".tmp";
    {
      std::ofstream os(tmp);
      os << kCacheFormat << " " << h << " ";
      char buf[80];
      std::snprintf(buf, sizeof buf, "%a %a\n", ref.dx_ref, ref.T);
      os << buf << ref.times.size() << "\n";
      write_doubles(os, ref.times);
      for (const auto& s : ref.states) {
        write_doubles(os, s.u.nodes());
        write_doubles(os, s.u.values());
        write_step(os, s.F_ac);
        write_step(os, s.F_sing);
        write_step(os, s.G);
      }
    }
    std::filesystem::rename(tmp, cache_file);  // atomic publish
  }
  return ref;
}

}  // namespace hsa
