#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "zerod/metrics.hpp"
#include "zerod/rom_builder.hpp"

namespace zt {

/// Least-squares fit with hat basis functions on fixed knots, solved by dense QR.
/// Returns the SSE and writes the knot values.
inline double hat_basis_sse(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const std::vector<Eigen::Index>& knots,
                            Eigen::VectorXd* values = nullptr) {
  const Eigen::Index m = x.size();
  const Eigen::Index n = static_cast<Eigen::Index>(knots.size());
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xc = x[knots[j]];
    for (Eigen::Index i = 0; i < m; ++i) {
      if (j > 0 && x[i] >= x[knots[j - 1]] && x[i] <= xc)
        B(i, j) = (x[i] - x[knots[j - 1]]) / (xc - x[knots[j - 1]]);
      if (j + 1 < n && x[i] >= xc && x[i] <= x[knots[j + 1]])
        B(i, j) = (x[knots[j + 1]] - x[i]) / (x[knots[j + 1]] - xc);
      if (i == knots[j]) B(i, j) = 1.0;
    }
  }
  const Eigen::VectorXd v = B.colPivHouseholderQr().solve(y);
  if (values) *values = v;
  return (B * v - y).squaredNorm();
}

/// Calls `visit` with every knot set {0 < k_1 < ... < k_{n-1} < m - 1}, lexicographic order.
inline void for_each_knot_set(Eigen::Index m, int n, const std::function<void(const std::vector<Eigen::Index>&)>& visit) {
  std::vector<Eigen::Index> knots(static_cast<std::size_t>(n) + 1);
  knots.front() = 0;
  knots.back() = m - 1;
  std::function<void(int, Eigen::Index)> rec = [&](int slot, Eigen::Index lo) {
    if (slot == n) {
      visit(knots);
      return;
    }
    for (Eigen::Index k = lo; k <= m - 1 - (n - slot); ++k) {
      knots[static_cast<std::size_t>(slot)] = k;
      rec(slot + 1, k + 1);
    }
  };
  rec(1, 1);
}

struct ExhaustiveFit {
  double sse = std::numeric_limits<double>::infinity();
  std::vector<Eigen::Index> knots;
};

/// Brute-force optimum over all knot sets; `score` evaluates one set. With a positive
/// `tie_tol` the lexicographically earliest set within tie_tol of the minimum wins.
inline ExhaustiveFit exhaustive_fit(Eigen::Index m, int n,
                                    const std::function<double(const std::vector<Eigen::Index>&)>& score,
                                    double tie_tol = 0.0) {
  std::vector<std::pair<std::vector<Eigen::Index>, double>> all;
  double min_sse = std::numeric_limits<double>::infinity();
  for_each_knot_set(m, n, [&](const std::vector<Eigen::Index>& k) {
    all.emplace_back(k, score(k));
    min_sse = std::min(min_sse, all.back().second);
  });
  ExhaustiveFit best;
  for (const auto& [k, s] : all) {
    if (tie_tol > 0.0 ? s <= min_sse + tie_tol : s == min_sse) {
      best.knots = k;
      best.sse = s;
      break;
    }
  }
  return best;
}

/// Radius profile r(s) = r0 (1 - depth (1 + cos(2 pi (s - c) / w)) / 2) inside the bump.
inline zerod::BranchProfile cosine_bump_profile(int id, int n_samples, double length, double r0, double center,
                                                 double width, double depth) {
  zerod::BranchProfile p;
  p.branch_id = id;
  p.path_length.resize(n_samples);
  p.area.resize(n_samples);
  const double pi = std::acos(-1.0);
  for (int i = 0; i < n_samples; ++i) {
    const double s = length * i / (n_samples - 1);
    double r = r0;
    if (std::abs(s - center) < 0.5 * width) r = r0 * (1.0 - 0.5 * depth * (1.0 + std::cos(2.0 * pi * (s - center) / width)));
    p.path_length[i] = s;
    p.area[i] = pi * r * r;
  }
  return p;
}

/// The eight cap errors by direct double summation over caps and time steps.
inline zerod::ErrorReport naive_cap_errors(const std::vector<zerod::CapSeries>& ref,
                                           const std::vector<zerod::CapSeries>& tst) {
  zerod::ErrorReport r;
  const std::size_t n_cap = ref.size();
  const Eigen::Index n_t = ref[0].pressure.size();
  const zerod::CapSeries* inlet = nullptr;
  for (const auto& c : ref)
    if (c.is_inlet) inlet = &c;
  Eigen::Index sys = 0, dia = 0;
  for (Eigen::Index t = 0; t < n_t; ++t) {
    if (inlet->flow[t] > inlet->flow[sys]) sys = t;
    if (inlet->flow[t] < inlet->flow[dia]) dia = t;
  }
  r.t_sys = sys;
  r.t_dia = dia;

  double pa = 0, pm = 0, ps = 0, pd = 0, qa = 0, qm = 0, qs = 0, qd = 0;
  std::size_t n_flow = 0;
  for (std::size_t i = 0; i < n_cap; ++i) {
    const zerod::CapSeries* t_cap = nullptr;
    for (const auto& c : tst)
      if (c.cap_id == ref[i].cap_id) t_cap = &c;
    double psum = 0, dsum = 0, dmax = 0;
    for (Eigen::Index t = 0; t < n_t; ++t) {
      psum += ref[i].pressure[t];
      const double d = std::abs(t_cap->pressure[t] - ref[i].pressure[t]);
      dsum += d;
      dmax = std::max(dmax, d);
    }
    pa += dsum / psum;
    pm += dmax / psum;
    ps += std::abs(t_cap->pressure[sys] - ref[i].pressure[sys]) / psum;
    pd += std::abs(t_cap->pressure[dia] - ref[i].pressure[dia]) / psum;
    if (ref[i].is_inlet) continue;
    ++n_flow;
    double qmax = -std::numeric_limits<double>::infinity(), qmin = -qmax, qsum = 0, qdmax = 0;
    for (Eigen::Index t = 0; t < n_t; ++t) {
      qmax = std::max(qmax, ref[i].flow[t]);
      qmin = std::min(qmin, ref[i].flow[t]);
      const double d = std::abs(t_cap->flow[t] - ref[i].flow[t]);
      qsum += d;
      qdmax = std::max(qdmax, d);
    }
    qa += qsum / (qmax - qmin);
    qm += qdmax / (qmax - qmin);
    qs += std::abs(t_cap->flow[sys] - ref[i].flow[sys]) / (qmax - qmin);
    qd += std::abs(t_cap->flow[dia] - ref[i].flow[dia]) / (qmax - qmin);
  }
  const double nc = static_cast<double>(n_cap), nt = static_cast<double>(n_t), nf = static_cast<double>(n_flow);
  r.pressure_avg = pa / nc;
  r.pressure_max = nt / nc * pm;
  r.pressure_sys = nt / nc * ps;
  r.pressure_dia = nt / nc * pd;
  if (n_flow > 0) {
    r.flow_avg = qa / (nf * nt);
    r.flow_max = qm / nf;
    r.flow_sys = qs / nf;
    r.flow_dia = qd / nf;
  }
  return r;
}

/// Random reference/test cap sets: one inlet plus `n_outlets`, n_t samples each.
inline std::pair<std::vector<zerod::CapSeries>, std::vector<zerod::CapSeries>> random_caps(std::mt19937_64& rng,
                                                                                           int n_outlets, int n_t) {
  std::uniform_real_distribution<double> p(5.0e4, 1.5e5), q(-10.0, 80.0), noise(-0.1, 0.1);
  std::vector<zerod::CapSeries> ref, tst;
  for (int c = 0; c <= n_outlets; ++c) {
    zerod::CapSeries r{c == 0 ? "inlet" : "cap" + std::to_string(c), c == 0, Eigen::VectorXd(n_t), Eigen::VectorXd(n_t)};
    zerod::CapSeries t = r;
    for (int i = 0; i < n_t; ++i) {
      r.pressure[i] = p(rng);
      r.flow[i] = q(rng);
      t.pressure[i] = r.pressure[i] * (1.0 + noise(rng));
      t.flow[i] = r.flow[i] + 10.0 * noise(rng);
    }
    ref.push_back(r);
    tst.push_back(t);
  }
  std::shuffle(tst.begin(), tst.end(), rng);
  return {ref, tst};
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace zt
