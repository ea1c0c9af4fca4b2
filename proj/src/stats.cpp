#include "atmocat/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "atmocat/errors.hpp"
#include "atmocat/url.hpp"

using nlohmann::json;

namespace atmocat {

std::vector<CountryCount> country_counts(const CatalogueStore& store) {
  std::map<std::string, std::int64_t> by_country;
  for (const auto& s : store.list_services()) ++by_country[s.country];
  std::vector<CountryCount> out;
  for (const auto& [c, n] : by_country) out.push_back({c, n});
  std::sort(out.begin(), out.end(), [](const CountryCount& a, const CountryCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.country < b.country;
  });
  return out;
}

namespace {

constexpr double kTieEps = 1e-9;

std::string csv_field(const std::string& s) {
  if (s.find(',') == std::string::npos && s.find('"') == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    q += c;
    if (c == '"') q += '"';
  }
  return q + "\"";
}

// Within-class sum of squared deviations for sorted[i..j], via prefix sums.
struct SsdTable {
  std::vector<double> pre, pre2;
  explicit SsdTable(const std::vector<double>& sorted) {
    pre.resize(sorted.size() + 1, 0);
    pre2.resize(sorted.size() + 1, 0);
    for (std::size_t t = 0; t < sorted.size(); ++t) {
      pre[t + 1] = pre[t] + sorted[t];
      pre2[t + 1] = pre2[t] + sorted[t] * sorted[t];
    }
  }
  double cost(std::size_t i, std::size_t j) const {
    double n = static_cast<double>(j - i + 1);
    double sum = pre[j + 1] - pre[i];
    double sum2 = pre2[j + 1] - pre2[i];
    double ssd = sum2 - sum * sum / n;
    return ssd < 0 ? 0 : ssd;
  }
};

}  // namespace

Classification jenks_breaks(const std::vector<double>& values, int k) {
  if (values.empty()) throw InvalidK("no values to classify");
  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  std::size_t distinct = 1;
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] != sorted[i - 1]) ++distinct;
  if (k < 1 || static_cast<std::size_t>(k) > distinct)
    throw InvalidK("k=" + std::to_string(k) + " exceeds " + std::to_string(distinct) +
                   " distinct values");

  std::size_t n = sorted.size();
  SsdTable ssd(sorted);

  // suffix_dp[c][i]: best cost of splitting sorted[i..n-1] into c classes.
  // Reconstructing from the front with the smallest feasible first break
  // yields the lexicographically smallest break-index sequence among ties.
  std::vector<std::vector<double>> dp(
      static_cast<std::size_t>(k) + 1,
      std::vector<double>(n + 1, std::numeric_limits<double>::infinity()));
  dp[0][n] = 0;
  for (int c = 1; c <= k; ++c)
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = i; j < n; ++j) {
        if (dp[c - 1][j + 1] == std::numeric_limits<double>::infinity()) continue;
        best = std::min(best, ssd.cost(i, j) + dp[c - 1][j + 1]);
      }
      dp[c][i] = best;
    }

  std::vector<std::size_t> break_idx;  // last index of each class but the last
  std::size_t i = 0;
  for (int c = k; c >= 1; --c) {
    if (c == 1) break;
    for (std::size_t j = i; j < n; ++j) {
      // breaks are class maxima, so a cut may not split a run of equal values
      if (j + 1 < n && sorted[j] == sorted[j + 1]) continue;
      double total = ssd.cost(i, j) + dp[c - 1][j + 1];
      if (total <= dp[c][i] + kTieEps) {
        break_idx.push_back(j);
        i = j + 1;
        break;
      }
    }
  }

  Classification cls;
  cls.k = k;
  for (std::size_t b : break_idx) cls.breaks.push_back(sorted[b]);

  // class of a value: 1 + number of breaks strictly below it
  cls.class_of.resize(values.size());
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    int c = 1;
    for (double b : cls.breaks)
      if (values[vi] > b) ++c;
    cls.class_of[vi] = c;
  }
  return cls;
}

double goodness_of_variance_fit(const std::vector<double>& values,
                                const Classification& c) {
  if (values.empty()) return 0;
  double mean = std::accumulate(values.begin(), values.end(), 0.0) /
                static_cast<double>(values.size());
  double sdam = 0;
  for (double v : values) sdam += (v - mean) * (v - mean);
  if (sdam == 0) return 1;

  std::vector<double> sums(static_cast<std::size_t>(c.k) + 1, 0);
  std::vector<std::size_t> ns(static_cast<std::size_t>(c.k) + 1, 0);
  for (std::size_t i = 0; i < values.size(); ++i) {
    sums[static_cast<std::size_t>(c.class_of[i])] += values[i];
    ++ns[static_cast<std::size_t>(c.class_of[i])];
  }
  double sdcm = 0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::size_t ci = static_cast<std::size_t>(c.class_of[i]);
    double m = sums[ci] / static_cast<double>(ns[ci]);
    sdcm += (values[i] - m) * (values[i] - m);
  }
  return (sdam - sdcm) / sdam;
}

CountryClassification classify_countries(const std::vector<CountryCount>& counts, int k) {
  CountryClassification out;
  if (counts.empty()) {
    out.effective_k = 0;
    return out;
  }
  std::vector<double> values;
  for (const auto& c : counts) values.push_back(static_cast<double>(c.count));
  std::set<double> distinct(values.begin(), values.end());
  int eff_k = k;
  if (static_cast<std::size_t>(k) > distinct.size()) {
    eff_k = static_cast<int>(distinct.size());
    out.fell_back = true;
  }
  out.effective_k = eff_k;
  out.classification = jenks_breaks(values, eff_k);

  int top_cutoff = std::max(1, eff_k - 2);  // classes >= cutoff are the top three
  for (std::size_t i = 0; i < counts.size(); ++i) {
    int cls = out.classification.class_of[i];
    out.class_by_country[counts[i].country] = cls;
    if (cls >= top_cutoff) out.labeled.insert(counts[i].country);
  }
  return out;
}

std::vector<ProviderCount> top_providers(const CatalogueStore& store, int n,
                                         const std::string& country) {
  std::map<std::string, std::int64_t> by_provider;
  for (const auto& s : store.list_services()) {
    if (!country.empty() && s.country != country) continue;
    std::string provider = s.provider_name;
    if (provider.empty()) {
      try {
        provider = Url::parse(s.url).host;
      } catch (const MalformedUrl&) {
        provider = s.url;
      }
    }
    ++by_provider[provider];
  }
  std::vector<ProviderCount> out;
  for (const auto& [p, c] : by_provider) out.push_back({p, c});
  std::sort(out.begin(), out.end(), [](const ProviderCount& a, const ProviderCount& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.provider < b.provider;
  });
  if (static_cast<int>(out.size()) > n) out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string countries_to_json(const std::vector<CountryCount>& counts,
                              const CountryClassification& cls) {
  json rows = json::array();
  for (const auto& c : counts) {
    auto it = cls.class_by_country.find(c.country);
    rows.push_back({{"country", c.country},
                    {"count", c.count},
                    {"classIndex", it == cls.class_by_country.end() ? 0 : it->second},
                    {"labeled", cls.labeled.count(c.country) > 0}});
  }
  return json{{"k", cls.effective_k}, {"fellBack", cls.fell_back}, {"countries", rows}}
      .dump();
}

std::string countries_to_csv(const std::vector<CountryCount>& counts,
                             const CountryClassification& cls) {
  std::ostringstream os;
  os << "country,count,classIndex,labeled\n";
  for (const auto& c : counts) {
    auto it = cls.class_by_country.find(c.country);
    os << csv_field(c.country) << ',' << c.count << ','
       << (it == cls.class_by_country.end() ? 0 : it->second) << ','
       << (cls.labeled.count(c.country) ? "true" : "false") << '\n';
  }
  return os.str();
}

std::string providers_to_json(const std::vector<ProviderCount>& providers) {
  json rows = json::array();
  for (const auto& p : providers)
    rows.push_back({{"provider", p.provider}, {"count", p.count}});
  return json{{"providers", rows}}.dump();
}

std::string providers_to_csv(const std::vector<ProviderCount>& providers) {
  std::ostringstream os;
  os << "provider,count\n";
  for (const auto& p : providers)
    os << csv_field(p.provider) << ',' << p.count << '\n';
  return os.str();
}

}  // namespace atmocat
