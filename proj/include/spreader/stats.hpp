// Two-sample significance testing between the fake- and real-spreader
// groups. Welch's unequal-variance t statistic with Satterthwaite degrees
// of freedom; two-tailed p-values through the regularized incomplete beta
// function.
#pragma once

#include <cmath>
#include <cstdio>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spreader/csv.hpp"
#include "spreader/features.hpp"

namespace spreader {

struct WelchResult {
  double t = 0.0;
  double df = 0.0;
};

enum class SigMarker { None, Star, DoubleStar };

inline const char* to_string(SigMarker m) {
  switch (m) {
    case SigMarker::Star: return "*";
    case SigMarker::DoubleStar: return "**";
    default: return "none";
  }
}

struct TTestResult {
  std::string feature_name;
  bool testable = false;
  std::string note;  // set when untestable
  double t_statistic = 0.0;
  double degrees_of_freedom = 0.0;
  double p_value = 1.0;
  SigMarker marker = SigMarker::None;
  std::size_t n_fake = 0;
  std::size_t n_real = 0;
};

namespace detail {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance, n-1 denominator
  std::size_t n = 0;
};

inline Moments moments(std::span<const double> xs) {
  Moments m;
  m.n = xs.size();
  if (m.n == 0) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(m.n);
  if (m.n >= 2) {
    double ss = 0.0;
    for (double x : xs) {
      const double d = x - m.mean;
      ss += d * d;
    }
    m.var = ss / static_cast<double>(m.n - 1);
  }
  return m;
}

// Continued fraction for the incomplete beta function (Lentz's method),
// 1e-12 convergence tolerance, 300-iteration cap.
inline double betacf(double a, double b, double x) {
  constexpr int kMaxIter = 300;
  constexpr double kEps = 1e-12;
  constexpr double kTiny = 1e-300;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete beta continued fraction did not converge");
}

inline double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_bt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
  const double bt = std::exp(ln_bt);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return bt * betacf(a, b, x) / a;
  }
  return 1.0 - bt * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

// Welch's t and the Welch-Satterthwaite degrees of freedom for two
// samples. Throws on degenerate input (either n < 2, or both variances
// zero).
inline WelchResult welch_t(std::span<const double> a, std::span<const double> b) {
  const auto ma = detail::moments(a);
  const auto mb = detail::moments(b);
  if (ma.n < 2 || mb.n < 2) {
    throw std::invalid_argument("welch_t requires at least 2 samples per group");
  }
  const double va = ma.var / static_cast<double>(ma.n);
  const double vb = mb.var / static_cast<double>(mb.n);
  const double se2 = va + vb;
  if (se2 <= 0.0) {
    throw std::invalid_argument("welch_t: zero variance in both groups");
  }
  WelchResult r;
  r.t = (ma.mean - mb.mean) / std::sqrt(se2);
  r.df = se2 * se2 /
         (va * va / static_cast<double>(ma.n - 1) + vb * vb / static_cast<double>(mb.n - 1));
  return r;
}

// Two-tailed Student-t p-value: P(|T| >= |t|) = I_x(df/2, 1/2) with
// x = df / (df + t^2).
inline double p_two_tailed(double t, double df) {
  if (!std::isfinite(t)) throw std::invalid_argument("p_two_tailed: non-finite t");
  if (!(df > 0.0)) throw std::invalid_argument("p_two_tailed: df must be positive");
  if (t == 0.0) return 1.0;
  const double x = df / (df + t * t);
  return detail::incomplete_beta(df / 2.0, 0.5, x);
}

inline SigMarker marker_for(double p) {
  if (p < 0.005) return SigMarker::DoubleStar;
  if (p < 0.05) return SigMarker::Star;
  return SigMarker::None;
}

// One Welch test per feature, in report order, with the fake group always
// the minuend. Masked entries are excluded per feature; a feature whose
// groups degenerate after masking is reported untestable instead of
// aborting the table.
inline std::vector<TTestResult> significance_table(const std::vector<LabeledFeatureRow>& rows) {
  std::size_t total_fake = 0, total_real = 0;
  for (const auto& row : rows) {
    (row.label.label == Spreader::FakeSpreader ? total_fake : total_real) += 1;
  }
  if (total_fake == 0 || total_real == 0) {
    throw std::invalid_argument("significance_table requires both spreader groups to be nonempty");
  }

  std::vector<TTestResult> results;
  results.reserve(kFeatureCount);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    TTestResult r;
    r.feature_name = kFeatureKeys[i];
    std::vector<double> fake, real;
    for (const auto& row : rows) {
      if (row.features.missing[i]) continue;
      (row.label.label == Spreader::FakeSpreader ? fake : real).push_back(row.features.values[i]);
    }
    r.n_fake = fake.size();
    r.n_real = real.size();
    try {
      const WelchResult w = welch_t(fake, real);
      r.t_statistic = w.t;
      r.degrees_of_freedom = w.df;
      r.p_value = p_two_tailed(w.t, w.df);
      r.marker = marker_for(r.p_value);
      r.testable = true;
    } catch (const std::exception& e) {
      r.testable = false;
      r.note = e.what();
    }
    results.push_back(std::move(r));
  }
  return results;
}

inline constexpr const char* kStatsCsvHeader = "feature,t,df,p,marker,n_fake,n_real";

inline std::string stats_to_csv(const std::vector<TTestResult>& results) {
  std::string out = kStatsCsvHeader;
  out += '\n';
  for (const auto& r : results) {
    out += r.feature_name;
    out += ',';
    if (r.testable) {
      out += format_value(r.t_statistic);
      out += ',';
      out += format_value(r.degrees_of_freedom);
      out += ',';
      out += format_value(r.p_value);
      out += ',';
      out += to_string(r.marker);
    } else {
      out += "nan,nan,nan,untestable";
    }
    out += ',';
    out += std::to_string(r.n_fake);
    out += ',';
    out += std::to_string(r.n_real);
    out += '\n';
  }
  return out;
}

// Plain-text table shaped like the published comparison: feature name plus
// the marked t statistic, fake minus real.
inline std::string stats_to_text(const std::vector<TTestResult>& results) {
  std::string out;
  out += "Comparison between fake news and real news spreaders (fake - real)\n";
  out += "Markers: ** p < 0.005, * p < 0.05\n\n";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-18s %14s %9s %9s\n", "Feature Name", "t-statistic", "n_fake", "n_real");
  out += buf;
  std::snprintf(buf, sizeof(buf), "%-18s %14s %9s %9s\n", "------------", "-----------", "------", "------");
  out += buf;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    const char* name = i < kFeatureCount ? kFeatureDisplayNames[i] : r.feature_name.c_str();
    std::string tcell;
    if (r.testable) {
      char num[32];
      std::snprintf(num, sizeof(num), "%.2f", r.t_statistic);
      tcell = num;
      if (r.marker == SigMarker::Star) tcell += "*";
      if (r.marker == SigMarker::DoubleStar) tcell += "**";
    } else {
      tcell = "untestable";
    }
    std::snprintf(buf, sizeof(buf), "%-18s %14s %9zu %9zu\n", name, tcell.c_str(), r.n_fake, r.n_real);
    out += buf;
  }
  return out;
}

}  // namespace spreader
