#include "oracle.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

using mgower::Dataset;
using mgower::Kind;

double quantile_sorted(const std::vector<double>& s, double p) {
  const double pos = p * static_cast<double>(s.size() - 1);
  const double lo = std::floor(pos);
  const double hi = std::ceil(pos);
  const double xl = s[static_cast<std::size_t>(lo)];
  const double xh = s[static_cast<std::size_t>(hi)];
  return xl + (pos - lo) * (xh - xl);
}

// Cells of column c over both tables (once when they are the same table).
std::vector<double> pool(const Dataset& a, const Dataset& b, std::size_t c, bool same) {
  std::vector<double> out;
  for (double v : a.column(c).values)
    if (!std::isnan(v)) out.push_back(v);
  if (!same)
    for (double v : b.column(c).values)
      if (!std::isnan(v)) out.push_back(v);
  return out;
}

double sample_sd(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  double mean = 0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double radius(const std::vector<double>& ref, double x, std::size_t k) {
  std::vector<double> d;
  bool skipped = false;
  for (double y : ref) {
    if (!skipped && y == x) {
      skipped = true;
      continue;
    }
    d.push_back(std::abs(x - y));
  }
  if (d.empty()) return -1.0;
  std::sort(d.begin(), d.end());
  return d[std::min(k, d.size()) - 1];
}

double manhattan(double a, double g) {
  if (g == 0.0) return a == 0.0 ? 0.0 : 1.0;
  return std::min(1.0, a / g);
}

struct Var {
  bool categorical = false;
  double w = 1.0;
  // d(i, j) or nullopt when the pair does not count
  std::vector<std::vector<std::optional<double>>> d;
};

}  // namespace

double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  return quantile_sorted(v, p);
}

Matrix distances(const Dataset& a, const Dataset& b, const Options& opt) {
  const std::size_t na = a.n_rows();
  const std::size_t nb = b.n_rows();
  const bool cond = opt.method == "cond";
  std::vector<Var> vars;

  for (std::size_t c = 0; c < a.n_cols(); ++c) {
    const auto& col = a.column(c);
    const auto& colb = b.column(c);
    double w = 1.0;
    if (auto it = opt.weights.find(col.name); it != opt.weights.end()) w = it->second;
    if (w <= 0.0) continue;

    Var v;
    v.w = w;
    v.categorical = col.kind.kind != Kind::Numeric;
    v.d.assign(na, std::vector<std::optional<double>>(nb));
    const auto ref = pool(a, b, c, opt.same);

    // per-column setup
    double g = 0, h = 0, span = 0;
    std::size_t k = 0;
    std::string how = opt.method;
    if (col.kind.kind == Kind::Numeric) {
      const double range = *std::max_element(ref.begin(), ref.end()) - *std::min_element(ref.begin(), ref.end());
      const double iqr = quantile(ref, 0.75) - quantile(ref, 0.25);
      bool by_iqr = opt.scale == "iqr";
      if (how == "std") by_iqr = false;
      if (how == "iqr") by_iqr = true;
      if (cond) how = by_iqr ? "iqr" : "std";
      g = by_iqr ? iqr : range;
      if (how == "kde1" || how == "kde2") {
        const double c0 = how == "kde1" ? 1.06 : 0.9;
        const double n = static_cast<double>(ref.size());
        const double sd = sample_sd(ref);
        const double r = iqr / 1.34;
        double s = std::min(sd, r);
        if (sd == 0.0 || r == 0.0) s = std::max(sd, r);
        h = ref.size() < 2 ? 0.0 : c0 * std::pow(n, -0.2) * s;
      }
      if (how == "knn") {
        k = opt.k;
        if (k == 0) {
          k = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(ref.size()))));
          if (ref.size() >= 2) k = std::min(k, ref.size() - 1);
          k = std::max<std::size_t>(k, 1);
        }
      }
    } else if (col.kind.kind == Kind::Ordinal) {
      if (opt.podani) {
        auto midrank = [&](double code) {
          double less = 0, eq = 0;
          for (double y : ref) {
            less += y < code;
            eq += y == code;
          }
          return less + (eq + 1.0) / 2.0;
        };
        double lo = 1e300, hi = -1e300;
        for (double y : ref) {
          lo = std::min(lo, midrank(y));
          hi = std::max(hi, midrank(y));
        }
        span = hi - lo;
        for (std::size_t i = 0; i < na; ++i)
          for (std::size_t j = 0; j < nb; ++j) {
            const double x = col.values[i], y = colb.values[j];
            if (std::isnan(x) || std::isnan(y) || span <= 0) continue;
            v.d[i][j] = std::min(1.0, std::abs(midrank(x) - midrank(y)) / span);
          }
        vars.push_back(std::move(v));
        continue;
      }
      double top = static_cast<double>(col.kind.categories.size());
      if (opt.observed_max) top = ref.empty() ? 1.0 : *std::max_element(ref.begin(), ref.end()) + 1.0;
      g = top - 1.0;
    }

    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        const double x = col.values[i], y = colb.values[j];
        if (std::isnan(x) || std::isnan(y)) continue;
        switch (col.kind.kind) {
          case Kind::BinaryAsymmetric:
            if (x == 0 && y == 0) break;
            v.d[i][j] = (x == 1 && y == 1) ? 0.0 : 1.0;
            break;
          case Kind::BinarySymmetric:
          case Kind::Nominal:
            v.d[i][j] = x == y ? 0.0 : 1.0;
            break;
          case Kind::Ordinal:
            v.d[i][j] = manhattan(std::abs(x - y), g);
            break;
          case Kind::Numeric: {
            const double diff = std::abs(x - y);
            double zero_within = -1.0;
            if (how == "kde1" || how == "kde2") zero_within = h;
            if (how == "knn") {
              zero_within = radius(ref, x, k);
              if (opt.symmetrize) zero_within = std::max(zero_within, radius(ref, y, k));
            }
            v.d[i][j] = diff <= zero_within ? 0.0 : manhattan(diff, g);
            break;
          }
        }
      }
    }
    vars.push_back(std::move(v));
  }

  auto gower = [&](std::size_t i, std::size_t j, bool weighted, int stage) -> std::optional<double> {
    double num = 0, den = 0;
    for (const auto& v : vars) {
      if (stage == 1 && !v.categorical) continue;
      if (stage == 2 && v.categorical) continue;
      if (!v.d[i][j]) continue;
      const double w = weighted ? v.w : 1.0;
      num += w * *v.d[i][j];
      den += w;
    }
    if (den == 0) return std::nullopt;
    return std::min(1.0, num / den);
  };

  Matrix out(na, std::vector<std::optional<double>>(nb));
  std::size_t p_cat = 0;
  for (const auto& v : vars) p_cat += v.categorical;

  for (std::size_t i = 0; i < na; ++i) {
    if (!cond) {
      for (std::size_t j = 0; j < nb; ++j) out[i][j] = gower(i, j, true, 0);
      continue;
    }
    if (p_cat == 0) {
      for (std::size_t j = 0; j < nb; ++j) out[i][j] = gower(i, j, false, 2);
      continue;
    }
    std::vector<double> first(nb);
    for (std::size_t j = 0; j < nb; ++j) first[j] = gower(i, j, false, 1).value_or(1.0);
    std::size_t m = p_cat;
    for (std::size_t cand = p_cat; cand >= 1; --cand) {
      bool any = false;
      for (double f : first) any = any || f <= static_cast<double>(cand) / static_cast<double>(p_cat) + 1e-9;
      if (any) m = cand;
    }
    for (std::size_t j = 0; j < nb; ++j) {
      if (first[j] <= static_cast<double>(m) / static_cast<double>(p_cat) + 1e-9) {
        out[i][j] = gower(i, j, false, 2);
      } else {
        out[i][j] = 1.0;
      }
    }
  }
  return out;
}

}  // namespace oracle
