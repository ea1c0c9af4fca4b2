#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "atmocat/store.hpp"

namespace atmocat {

struct CountryCount {
  std::string country;
  std::int64_t count = 0;
};

struct Classification {
  int k = 1;
  std::vector<double> breaks;  // k-1 values: max of each class but the last
  std::vector<int> class_of;   // per input value, 1..k ascending by value
};

// Per-country service counts, ordered (count desc, country asc).
std::vector<CountryCount> country_counts(const CatalogueStore& store);

// Jenks natural breaks: contiguous partition of the sorted values into k
// classes minimizing total within-class squared deviation from the class
// mean. Equal-cost ties resolve to the lexicographically smallest break
// indices. Throws InvalidK when k exceeds the distinct-value count.
Classification jenks_breaks(const std::vector<double>& values, int k);

// Goodness of variance fit in [0,1] for a classification of these values.
double goodness_of_variance_fit(const std::vector<double>& values,
                                const Classification& c);

struct CountryClassification {
  Classification classification;
  std::map<std::string, int> class_by_country;
  std::set<std::string> labeled;  // countries in the top three classes
  bool fell_back = false;         // k reduced to the distinct-count
  int effective_k = 0;
};

CountryClassification classify_countries(const std::vector<CountryCount>& counts,
                                         int k = 6);

struct ProviderCount {
  std::string provider;
  std::int64_t count = 0;
};

// Grouped by provider name (capabilities host when empty), optionally
// filtered by country, ordered (count desc, name asc), truncated to n.
std::vector<ProviderCount> top_providers(const CatalogueStore& store, int n,
                                         const std::string& country = "");

// Exports (country table includes class index and labeled flag).
std::string countries_to_json(const std::vector<CountryCount>& counts,
                              const CountryClassification& cls);
std::string countries_to_csv(const std::vector<CountryCount>& counts,
                             const CountryClassification& cls);
std::string providers_to_json(const std::vector<ProviderCount>& providers);
std::string providers_to_csv(const std::vector<ProviderCount>& providers);

}  // namespace atmocat
