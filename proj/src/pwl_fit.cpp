#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "zerod/rom_builder.hpp"

// Continuous piecewise-linear least squares with knots on sample locations.
//
// With knots k_0 = 0 < ... < k_n = m - 1 and knot values v_j, the samples i in
// [k_j, k_{j+1}) are fitted by v_j (1 - l_i) + v_{j+1} l_i and the last sample by v_n.
// The cost of one piece is a quadratic form in (v_j, v_{j+1}), so the optimal cost of
// fitting everything right of a knot, as a function of that knot's value, is the lower
// envelope of a finite set of quadratics. The backward pass keeps these envelopes per
// (pieces left, knot); the forward pass then picks the earliest optimal knots.

namespace zerod {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Quadratic {
  double a2 = 0.0, a1 = 0.0, a0 = 0.0;

  double operator()(double v) const { return (a2 * v + a1) * v + a0; }
  double min_value() const { return a0 - a1 * a1 / (4.0 * a2); }
};

// cost(u, w) = A u^2 + 2 B u w + C w^2 - 2 D u - 2 E w + F over samples [a, b).
struct PieceCost {
  double A, B, C, D, E, F;
};

// Running sums over [a, b) with t = x_i - x_a, extended one sample at a time.
class PieceAccumulator {
 public:
  PieceAccumulator(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Eigen::Index a) : x_(x), y_(y), a_(a), b_(a) {}

  /// Extends the range to [a, b + 1) and returns the cost of the piece ending at knot b + 1.
  PieceCost advance() {
    const double t = x_[b_] - x_[a_];
    const double v = y_[b_];
    ++b_;
    n_ += 1.0;
    st_ += t;
    stt_ += t * t;
    sy_ += v;
    syt_ += v * t;
    syy_ += v * v;

    const double h = x_[b_] - x_[a_];
    const double sl = st_ / h;
    const double sll = stt_ / (h * h);
    const double syl = syt_ / h;
    return {n_ - 2.0 * sl + sll, sl - sll, sll, sy_ - syl, syl, syy_};
  }

  Eigen::Index end() const noexcept { return b_; }

 private:
  const Eigen::VectorXd& x_;
  const Eigen::VectorXd& y_;
  Eigen::Index a_, b_;
  double n_ = 0, st_ = 0, stt_ = 0, sy_ = 0, syt_ = 0, syy_ = 0;
};

// min over w of cost(u, w) + q(w), as a quadratic in u.
Quadratic compose_backward(const PieceCost& c, const Quadratic& q) {
  const double g = c.C + q.a2;
  const double k = q.a1 - 2.0 * c.E;
  return {c.A - c.B * c.B / g, -2.0 * c.D - c.B * k / g, c.F + q.a0 - k * k / (4.0 * g)};
}

// min over u of p(u) + cost(u, w), as a quadratic in w.
Quadratic compose_forward(const Quadratic& p, const PieceCost& c) {
  const double g = c.A + p.a2;
  const double k = p.a1 - 2.0 * c.D;
  return {c.C - c.B * c.B / g, -2.0 * c.E - c.B * k / g, c.F + p.a0 - k * k / (4.0 * g)};
}

// Smallest v >= v0 with a(v) < b(v) - tol, or +inf.
double entry_point(const Quadratic& a, const Quadratic& b, double v0, double tol) {
  const double da = a.a2 - b.a2;
  const double db = a.a1 - b.a1;
  const double dc = a.a0 - b.a0 + tol;  // f(v) = d(v) + tol < 0 wanted
  if (da == 0.0) {
    if (db == 0.0) return dc < 0.0 ? v0 : kInf;
    const double r = -dc / db;
    if (db < 0.0) return std::max(r, v0);
    return v0 < r ? v0 : kInf;
  }
  const double disc = db * db - 4.0 * da * dc;
  if (disc <= 0.0) return da < 0.0 ? v0 : kInf;
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (db + std::copysign(sq, db));
  double r1 = qq / da;
  double r2 = qq != 0.0 ? dc / qq : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (da > 0.0) return v0 < r2 ? std::max(r1, v0) : kInf;
  return v0 < r1 ? v0 : std::max(r2, v0);
}

// Drops quadratics that are nowhere (within tol) the minimum of the set.
void prune_to_envelope(std::vector<Quadratic>& qs, double tol) {
  const std::size_t n = qs.size();
  if (n <= 1) return;

  // Lowest piece as v -> -inf.
  std::size_t cur = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const auto& a = qs[k];
    const auto& b = qs[cur];
    if (a.a2 < b.a2 || (a.a2 == b.a2 && (a.a1 > b.a1 || (a.a1 == b.a1 && a.a0 < b.a0)))) cur = k;
  }

  std::vector<char> keep(n, 0);
  keep[cur] = 1;
  double v = -kInf;
  for (std::size_t iter = 0; iter < 4 * n + 8; ++iter) {
    double best_v = kInf;
    std::size_t best = n;
    for (std::size_t k = 0; k < n; ++k) {
      if (k == cur) continue;
      const double e = entry_point(qs[k], qs[cur], v, tol);
      if (e < best_v) {
        best_v = e;
        best = k;
      }
    }
    if (best == n) break;
    cur = best;
    v = best_v;
    keep[cur] = 1;
  }

  std::size_t out = 0;
  for (std::size_t k = 0; k < n; ++k)
    if (keep[k]) qs[out++] = qs[k];
  qs.resize(out);
}

void check_inputs(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) throw Error(ErrorCode::DimensionMismatch, "x and y differ in length");
  for (Eigen::Index i = 1; i < x.size(); ++i) {
    if (!(x[i] > x[i - 1])) throw Error(ErrorCode::NonPositiveGeometry, "sample positions must increase strictly");
  }
}

}  // namespace

PiecewiseLinearFit fit_with_knots(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                  std::vector<Eigen::Index> knots) {
  check_inputs(x, y);
  const Eigen::Index m = x.size();
  if (knots.size() < 2 || knots.front() != 0 || knots.back() != m - 1)
    throw Error(ErrorCode::TooFewSamples, "knots must start at the first and end at the last sample");
  for (std::size_t j = 1; j < knots.size(); ++j)
    if (knots[j] <= knots[j - 1]) throw Error(ErrorCode::TooFewSamples, "knots must increase strictly");

  const auto n = static_cast<Eigen::Index>(knots.size()) - 1;
  Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(n + 1, n + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    PieceAccumulator acc(x, y, knots[j]);
    PieceCost c{};
    while (acc.end() < knots[j + 1]) c = acc.advance();
    normal(j, j) += c.A;
    normal(j, j + 1) += c.B;
    normal(j + 1, j) += c.B;
    normal(j + 1, j + 1) += c.C;
    rhs[j] += c.D;
    rhs[j + 1] += c.E;
  }
  normal(n, n) += 1.0;
  rhs[n] += y[m - 1];

  PiecewiseLinearFit fit;
  fit.knots = std::move(knots);
  fit.knot_values = normal.ldlt().solve(rhs);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::Index a = fit.knots[j], b = fit.knots[j + 1];
    const double h = x[b] - x[a];
    for (Eigen::Index i = a; i < b; ++i) {
      const double l = (x[i] - x[a]) / h;
      const double r = y[i] - (fit.knot_values[j] * (1.0 - l) + fit.knot_values[j + 1] * l);
      fit.sse += r * r;
    }
  }
  const double r_last = y[m - 1] - fit.knot_values[n];
  fit.sse += r_last * r_last;
  return fit;
}

PiecewiseLinearFit fit_piecewise_linear(const Eigen::VectorXd& x, const Eigen::VectorXd& y, int n) {
  check_inputs(x, y);
  const Eigen::Index m = x.size();
  if (n < 1 || m < n + 1)
    throw Error(ErrorCode::TooFewSamples,
                std::to_string(m) + " samples cannot carry " + std::to_string(n) + " segments");

  const double scale = std::max(y.squaredNorm(), std::numeric_limits<double>::min());
  const double prune_tol = 1e-14 * scale;
  const double tie_tol = 1e-11 * scale;

  // envelope[j][a]: optimal cost of samples a.. with j pieces left, as a function of v_a.
  std::vector<std::vector<std::vector<Quadratic>>> envelope(
      static_cast<std::size_t>(n) + 1, std::vector<std::vector<Quadratic>>(static_cast<std::size_t>(m)));
  envelope[0][m - 1] = {{1.0, -2.0 * y[m - 1], y[m - 1] * y[m - 1]}};

  for (int j = 1; j <= n; ++j) {
    const Eigen::Index a_lo = n - j;
    const Eigen::Index a_hi = m - 1 - j;
    for (Eigen::Index a = a_lo; a <= a_hi; ++a) {
      auto& out = envelope[j][a];
      PieceAccumulator acc(x, y, a);
      while (acc.end() < m - j) {
        const PieceCost c = acc.advance();
        for (const Quadratic& q : envelope[j - 1][acc.end()]) out.push_back(compose_backward(c, q));
      }
      prune_to_envelope(out, prune_tol);
    }
  }

  double best = kInf;
  for (const Quadratic& q : envelope[n][0]) best = std::min(best, q.min_value());

  // Forward pass: earliest knot whose best completion stays within tie_tol of optimal.
  std::vector<Eigen::Index> knots{0};
  Quadratic prefix{};
  Eigen::Index a = 0;
  for (int left = n; left > 0; --left) {
    PieceAccumulator acc(x, y, a);
    Eigen::Index chosen = -1;
    PieceCost chosen_cost{};
    double chosen_total = kInf;
    while (acc.end() < m - left) {
      const PieceCost c = acc.advance();
      double total = kInf;
      for (const Quadratic& q : envelope[left - 1][acc.end()]) {
        Quadratic u = compose_backward(c, q);
        u.a2 += prefix.a2;
        u.a1 += prefix.a1;
        u.a0 += prefix.a0;
        total = std::min(total, u.min_value());
      }
      if (total <= best + tie_tol) {
        chosen = acc.end();
        chosen_cost = c;
        break;
      }
      if (total < chosen_total) {
        chosen_total = total;
        chosen = acc.end();
        chosen_cost = c;
      }
    }
    prefix = compose_forward(prefix, chosen_cost);
    knots.push_back(chosen);
    a = chosen;
  }
  return fit_with_knots(x, y, std::move(knots));
}

}  // namespace zerod
