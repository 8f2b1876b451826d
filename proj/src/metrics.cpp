#include "zerod/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "zerod/error.hpp"

namespace zerod {

std::pair<Eigen::Index, Eigen::Index> systole_diastole_indices(const Eigen::VectorXd& inlet_flow) {
  if (inlet_flow.size() == 0) throw Error(ErrorCode::MismatchedCaps, "empty inlet flow");
  Eigen::Index sys = 0, dia = 0;
  for (Eigen::Index t = 1; t < inlet_flow.size(); ++t) {
    if (inlet_flow[t] > inlet_flow[sys]) sys = t;
    if (inlet_flow[t] < inlet_flow[dia]) dia = t;
  }
  return {sys, dia};
}

ErrorReport cap_errors(const std::vector<CapSeries>& reference, const std::vector<CapSeries>& test) {
  if (reference.size() != test.size() || reference.empty())
    throw Error(ErrorCode::MismatchedCaps, "reference and test cap counts differ or are zero");

  std::map<std::string, const CapSeries*> by_id;
  for (const auto& cap : test) {
    if (!by_id.emplace(cap.cap_id, &cap).second) throw Error(ErrorCode::MismatchedCaps, "duplicate cap '" + cap.cap_id + "'");
  }

  const CapSeries* inlet = nullptr;
  const Eigen::Index n_t = reference.front().pressure.size();
  for (const auto& ref : reference) {
    auto it = by_id.find(ref.cap_id);
    if (it == by_id.end()) throw Error(ErrorCode::MismatchedCaps, "cap '" + ref.cap_id + "' missing from test");
    const CapSeries& tst = *it->second;
    if (ref.pressure.size() != n_t || ref.flow.size() != n_t || tst.pressure.size() != n_t || tst.flow.size() != n_t)
      throw Error(ErrorCode::MismatchedCaps, "cap '" + ref.cap_id + "' has a different number of time steps");
    if (ref.is_inlet) {
      if (inlet != nullptr) throw Error(ErrorCode::MismatchedCaps, "more than one inlet cap");
      inlet = &ref;
    }
  }
  if (inlet == nullptr) throw Error(ErrorCode::MismatchedCaps, "no inlet cap");
  if (n_t < 2) throw Error(ErrorCode::MismatchedCaps, "need at least two time steps");

  ErrorReport rep;
  std::tie(rep.t_sys, rep.t_dia) = systole_diastole_indices(inlet->flow);

  const double nt = static_cast<double>(n_t);
  const double n_cap = static_cast<double>(reference.size());
  const double n_cap_flow = n_cap - 1.0;

  for (const auto& ref : reference) {
    const CapSeries& tst = *by_id.at(ref.cap_id);

    const Eigen::ArrayXd dp = (tst.pressure - ref.pressure).array().abs();
    const double p_sum = ref.pressure.sum();
    rep.pressure_avg += dp.sum() / p_sum;
    rep.pressure_max += dp.maxCoeff() / p_sum;
    rep.pressure_sys += dp[rep.t_sys] / p_sum;
    rep.pressure_dia += dp[rep.t_dia] / p_sum;

    if (ref.is_inlet) continue;  // prescribed, not an error
    const double amplitude = ref.flow.maxCoeff() - ref.flow.minCoeff();
    if (!(amplitude > 0.0)) throw Error(ErrorCode::ZeroFlowAmplitude, "cap '" + ref.cap_id + "'");
    const Eigen::ArrayXd dq = (tst.flow - ref.flow).array().abs();
    rep.flow_avg += dq.sum() / amplitude;
    rep.flow_max += dq.maxCoeff() / amplitude;
    rep.flow_sys += dq[rep.t_sys] / amplitude;
    rep.flow_dia += dq[rep.t_dia] / amplitude;
  }

  rep.pressure_avg /= n_cap;
  rep.pressure_max *= nt / n_cap;
  rep.pressure_sys *= nt / n_cap;
  rep.pressure_dia *= nt / n_cap;
  if (n_cap_flow > 0.0) {
    rep.flow_avg /= n_cap_flow * nt;
    rep.flow_max /= n_cap_flow;
    rep.flow_sys /= n_cap_flow;
    rep.flow_dia /= n_cap_flow;
  }
  return rep;
}

namespace {
double lerp_at(const Eigen::VectorXd& x, const Eigen::VectorXd& v, double q) {
  const double* begin = x.data();
  const double* end = begin + x.size();
  auto it = std::upper_bound(begin, end, q);
  Eigen::Index i = std::clamp<Eigen::Index>(static_cast<Eigen::Index>(it - begin) - 1, 0, x.size() - 2);
  if (q == x[i]) return v[i];
  if (i + 1 == x.size() - 1 && q == x[i + 1]) return v[i + 1];
  return v[i] + (v[i + 1] - v[i]) * ((q - x[i]) / (x[i + 1] - x[i]));
}
}  // namespace

Eigen::VectorXd branch_interpolate(const Eigen::VectorXd& positions, const Eigen::VectorXd& values,
                                   const Eigen::VectorXd& queries) {
  if (positions.size() != values.size() || positions.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "need at least two matching positions and values");
  for (Eigen::Index i = 1; i < positions.size(); ++i)
    if (!(positions[i] > positions[i - 1])) throw Error(ErrorCode::OutOfRange, "positions must increase strictly");

  Eigen::VectorXd out(queries.size());
  for (Eigen::Index k = 0; k < queries.size(); ++k) {
    const double q = queries[k];
    if (!(q >= positions[0] && q <= positions[positions.size() - 1]))
      throw Error(ErrorCode::OutOfRange, "query " + std::to_string(q) + " outside the branch");
    out[k] = lerp_at(positions, values, q);
  }
  return out;
}

Eigen::VectorXd resample_linear(const Eigen::VectorXd& times, const Eigen::VectorXd& values,
                                const Eigen::VectorXd& grid) {
  if (times.size() != values.size() || times.size() < 2)
    throw Error(ErrorCode::DimensionMismatch, "need at least two matching times and values");
  Eigen::VectorXd out(grid.size());
  for (Eigen::Index k = 0; k < grid.size(); ++k) {
    const double q = std::clamp(grid[k], times[0], times[times.size() - 1]);
    out[k] = lerp_at(times, values, q);
  }
  return out;
}

}  // namespace zerod
