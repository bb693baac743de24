// Acceptance checks. One PASS/FAIL line per criterion; exit status 1 if any fail.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "dld/descriptor.hpp"
#include "dld/errors.hpp"
#include "dld/grid_engine.hpp"
#include "dld/io.hpp"
#include "dld/map_kernel.hpp"
#include "dld/oracles.hpp"
#include "dld/singularity.hpp"

using namespace dld;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double rel_err(double a, double b) {
  if (a == b) return 0.0;
  return std::fabs(a - b) / std::max(std::fabs(a), std::fabs(b));
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("[%s] criterion %d: %s -- %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DescriptorParams henon_params(TimeIndex n0 = 0) {
  DescriptorParams p{0.05, 5};
  p.n0 = n0;
  p.escape_radius = 50.0;
  return p;
}

const GridSpec kHenonGrid{-6, 6, -6, 6, 800, 800};

// Values at the nodes nearest both fixed points must be below the 10th
// percentile of the non-escaped values.
Outcome fixed_points_low(const FieldResult& f) {
  const double p10 = percentile_non_escaped(f, 0.10);
  bool ok = true;
  std::ostringstream d;
  d << "p10=" << p10;
  for (const MapPoint& fp : henon_fixed_points(9.5, -1.0)) {
    const auto [i, j] = nearest_node(f.grid, fp);
    const double v = f.at(i, j);
    ok = ok && v < p10;
    d << fmt(" (%.4f,%.4f): md=%.4f%s", fp.x, fp.y, v, f.escaped_at(i, j) ? " escaped" : "");
  }
  return {ok, d.str()};
}

}  // namespace

int main() {
  report(1, "linear saddle field matches the closed form", [] {
    const auto t0 = Clock::now();
    LinearSaddle k({1.1});
    const GridSpec g{-0.5, 0.5, -0.5, 0.5, 201, 201};
    const auto f = evaluate_field(k, g, {0.5, 20}, 1);
    const double elapsed = seconds_since(t0);
    double worst = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) worst = std::max(worst, rel_err(f.at(i, j), md_linear_saddle(g.x(i), g.y(j), 1.1, 0.5, 20)));
    return Outcome{worst <= 1e-12 && elapsed < 10.0, fmt("max_rel_err=%.3e time=%.3fs", worst, elapsed)};
  });

  report(2, "refinement exponent at the linear-saddle crossing", [] {
    LinearSaddle k({1.1});
    const TransectSpec spec{{0, 0.25}, {1, 0}, 0.5, 401};
    const auto r = scan_transect(k, spec, {0.5, 20});
    if (r.crossings.size() != 1) return Outcome{false, fmt("crossings=%zu", r.crossings.size())};
    const MapPoint c = spec.point_at(r.crossings[0].position);
    const std::array<double, 4> s{1e-2, 5e-3, 2.5e-3, 1.25e-3};
    const double e_half = refinement_exponent(k, c, spec.direction, {0.5, 20}, s);
    const double e_one = refinement_exponent(k, c, spec.direction, {1.0, 20}, s);
    bool ok = std::fabs(e_half + 0.5) <= 0.05 && std::fabs(e_one) <= 0.05;
    std::string d = fmt("p=0.5: %.4f p=1: %.4f", e_half, e_one);
    for (double p : {0.25, 0.5, 0.75}) {
      const double e = refinement_exponent(k, c, spec.direction, {p, 20}, s);
      ok = ok && std::fabs(e - (p - 1.0)) <= 0.1;
      d += fmt(" [p=%.2f: %.4f]", p, e);
    }
    return Outcome{ok, d};
  });

  report(3, "rotated saddle singular lines", [] {
    bool ok = std::fabs(slope_m(1.1, 20) - 1.0) < 0.05;
    for (double l : {1.05, 1.1, 2.0}) {
      for (int i = 0; i < 100; ++i) {
        const double a = slope_m(l, i), b = slope_m(l, i + 1);
        ok = ok && b >= a && b <= 1.0 && (a >= 1.0 - 1e-12 || b > a);
      }
      ok = ok && std::fabs(slope_m(l, 5000) - 1.0) < 1e-12;
    }
    RotatedSaddle k({1.1});
    const GridSpec g{-0.5, 0.5, -0.5, 0.5, 201, 201};
    const auto field = evaluate_field(k, g, {0.5, 100}, 8);
    const auto dirs = singular_directions(field, {0, 0}, 0.1);
    if (dirs.size() < 2) return Outcome{false, fmt("directions found=%zu", dirs.size())};
    std::array<double, 2> a{dirs[0].angle_deg, dirs[1].angle_deg};
    std::sort(a.begin(), a.end());
    ok = ok && std::fabs(a[0] - 45.0) <= 2.0 && std::fabs(a[1] - 135.0) <= 2.0;
    return Outcome{ok, fmt("m(1.1,20)=%.6f angles=%.2f,%.2f", slope_m(1.1, 20), a[0], a[1])};
  });

  report(4, "normal form matches its closed form", [] {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    double worst = 0.0;
    for (double u2 : {0.0, 0.5, -0.5}) {
      NormalForm k({1.1, u2});
      for (int N : {5, 20}) {
        int used = 0;
        while (used < 200) {
          const double xi = u(rng), eta = u(rng);
          if (1.1 + u2 * xi * eta <= 1.0 + 1e-3) continue;
          ++used;
          worst = std::max(worst, rel_err(md_point(k, {xi, eta}, {0.5, N}).md_total,
                                          md_normal_form(xi, eta, {1.1, u2}, 0.5, N)));
        }
      }
    }
    return Outcome{worst <= 1e-10, fmt("max_rel_err=%.3e", worst)};
  });

  report(5, "nonautonomous linear saddle matches its closed form", [] {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> lam(std::nextafter(1.0, 2.0), 2.0), u(-1, 1);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
      const int N = 1 + t % 20;
      std::vector<double> table(2 * N);
      for (double& l : table) l = lam(rng);
      const auto seq = LambdaSequence::table(-N, table);
      NonautonomousLinear k(seq);
      const double x = u(rng), y = u(rng);
      worst = std::max(worst, rel_err(md_point(k, {x, y}, {0.5, N}).md_total,
                                      md_nonautonomous_linear(x, y, seq, 0.5, N)));
    }
    LinearSaddle a({1.1});
    NonautonomousLinear c(LambdaSequence::constant(1.1));
    bool bitwise = true;
    for (int t = 0; t < 200; ++t) {
      const MapPoint q{u(rng), u(rng)};
      bitwise = bitwise && md_point(a, q, {0.5, 20}).md_total == md_point(c, q, {0.5, 20}).md_total;
    }
    return Outcome{worst <= 1e-10 && bitwise,
                   fmt("max_rel_err=%.3e constant_reduction=%s", worst, bitwise ? "bitwise" : "differs")};
  });

  report(6, "Henon chaos threshold", [] {
    const double a2 = henon_chaos_threshold(-1.0);
    const double err = std::fabs(a2 - 9.4721359549995793928);
    return Outcome{err <= 1e-12, fmt("A2=%.16f err=%.2e", a2, err)};
  });

  report(7, "autonomous Henon field", [] {
    const auto t0 = Clock::now();
    const auto f = evaluate_field(Henon({9.5, -1.0, 0.0}), kHenonGrid, henon_params(), 8);
    const double elapsed = seconds_since(t0);
    const Outcome a = fixed_points_low(f);
    const int comps = count_components(low_value_mask(f, 0.05), f.grid.nx, f.grid.ny);
    const bool ok = a.pass && comps > 1 && elapsed < 60.0;
    return Outcome{ok, a.detail + fmt(" low_set_components=%d time=%.2fs", comps, elapsed)};
  });

  report(8, "forced Henon field depends on the base time", [] {
    std::vector<FieldResult> fields;
    bool each = true;
    std::string d;
    for (TimeIndex n0 : {-3, -1, 1, 3}) {
      fields.push_back(evaluate_field(Henon({9.5, -1.0, 0.2}), kHenonGrid, henon_params(n0), 8));
      const Outcome o = fixed_points_low(fields.back());
      each = each && o.pass;
    }
    double min_linf = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < fields.size(); ++a) {
      for (std::size_t b = a + 1; b < fields.size(); ++b) {
        double linf = 0.0;
        for (std::size_t k = 0; k < fields[a].values.size(); ++k) {
          linf = std::max(linf, std::fabs(fields[a].values[k] - fields[b].values[k]));
        }
        min_linf = std::min(min_linf, linf);
      }
    }
    const auto forced0 = evaluate_field(Henon({9.5, -1.0, 0.0}), kHenonGrid, henon_params(2), 8);
    const auto autonomous = evaluate_field(Henon({9.5, -1.0, 0.0}), kHenonGrid, henon_params(0), 8);
    const bool limit = forced0.values == autonomous.values && forced0.escaped == autonomous.escaped;
    d = fmt("min_pairwise_linf=%.4g fixed_points_low=%s eps0_bitwise=%s", min_linf, each ? "yes" : "no",
            limit ? "yes" : "no");
    return Outcome{min_linf > 0.0 && each && limit, d};
  });

  report(9, "field is independent of the worker count", [] {
    const GridSpec g{-6, 6, -6, 6, 300, 300};
    const auto a = evaluate_field(Henon({9.5, -1.0, 0.2}), g, henon_params(1), 1);
    bool same = true;
    for (int w : {2, 8}) {
      const auto b = evaluate_field(Henon({9.5, -1.0, 0.2}), g, henon_params(1), w);
      same = same && a.values == b.values && a.escaped == b.escaped;
    }
    RotatedSaddle r({1.1});
    const GridSpec s{-0.5, 0.5, -0.5, 0.5, 101, 101};
    const auto c = evaluate_field(r, s, {0.5, 20}, 1);
    for (int w : {2, 8}) same = same && c.values == evaluate_field(r, s, {0.5, 20}, w).values;
    return Outcome{same, same ? "workers 1, 2, 8 bitwise identical" : "fields differ"};
  });

  report(10, "serialization", [] {
    const auto f = evaluate_field(Henon({9.5, -1.0, 0.0}), {-6, 6, -6, 6, 120, 90}, henon_params(), 4);
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    io::write_dldgrid(bin, f);
    const auto g = io::read_dldgrid(bin);
    const bool round = g.grid == f.grid && g.params.p == f.params.p && g.params.N == f.params.N &&
                       g.values == f.values && g.escaped == f.escaped;
    std::stringstream pgm(std::ios::in | std::ios::out | std::ios::binary);
    io::write_pgm(pgm, f);
    const bool header = pgm.str().rfind("P5\n120 90\n65535\n", 0) == 0;
    const auto img = io::read_pgm(pgm);
    bool escaped_white = true;
    for (int j = 0; j < 90; ++j)
      for (int i = 0; i < 120; ++i)
        if (f.escaped_at(i, j)) escaped_white = escaped_white && img.pixels[(89 - j) * 120 + i] == 65535;
    const bool ok = round && header && img.width == 120 && img.height == 90 && escaped_white;
    return Outcome{ok, fmt("dldgrid_round_trip=%s pgm_p5=%s escaped_max=%s", round ? "ok" : "bad",
                           header ? "ok" : "bad", escaped_white ? "ok" : "bad")};
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
