#include "atmocat/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "atmocat/errors.hpp"
#include "atmocat/url.hpp"

namespace atmocat {

CompletenessView completeness_view(const ServiceDraft& svc,
                                   const std::vector<LayerDraft>& layers) {
  CompletenessView v;
  v.has_title = !svc.title.empty();
  v.has_abstract = !svc.abstract_.empty();
  v.has_keywords = !svc.keywords.empty();
  v.has_contact = !svc.contact.empty() || !svc.provider_name.empty();
  for (const auto& l : layers) {
    if (l.bbox) v.has_bbox = true;
    if (!l.supported_srs.empty()) v.has_srs = true;
    if (!l.keywords.empty()) v.has_keywords = true;
  }
  return v;
}

CompletenessView completeness_view(const CatalogueRecord& r) {
  CompletenessView v;
  v.has_title = !r.meta.title.empty();
  v.has_abstract = !r.meta.abstract_.empty();
  v.has_keywords = !r.meta.keywords.empty();
  v.has_bbox = r.layer.bbox.has_value();
  v.has_srs = !r.layer.supported_srs.empty();
  v.has_contact = !r.service.provider_name.empty();
  return v;
}

double completeness(const CompletenessView& v) {
  int present = static_cast<int>(v.has_title) + static_cast<int>(v.has_abstract) +
                static_cast<int>(v.has_keywords) + static_cast<int>(v.has_bbox) +
                static_cast<int>(v.has_srs) + static_cast<int>(v.has_contact);
  return present / 6.0;
}

double latency_score(const std::vector<ProbeSample>& recent_first, double half_life_ms) {
  if (recent_first.empty()) throw NoSamples("latency score needs at least one sample");
  std::vector<double> window;
  for (std::size_t i = 0; i < recent_first.size() && i < 10; ++i) {
    const auto& s = recent_first[i];
    window.push_back(s.latency_ms ? static_cast<double>(*s.latency_ms)
                                  : 4.0 * half_life_ms);
  }
  std::sort(window.begin(), window.end());
  std::size_t n = window.size();
  double median = (n % 2) ? window[n / 2] : 0.5 * (window[n / 2 - 1] + window[n / 2]);
  return std::exp2(-median / half_life_ms);
}

ScoreBreakdown combine_score(double completeness, double latency_score,
                             const ScoreWeights& w) {
  if (w.completeness < 0 || w.latency < 0 ||
      std::abs(w.completeness + w.latency - 1.0) > 1e-9)
    throw InvalidWeights("weights must be non-negative and sum to 1");
  ScoreBreakdown b;
  b.completeness = completeness;
  b.latency_score = latency_score;
  b.weights = w;
  b.combined = w.completeness * completeness + w.latency * latency_score;
  return b;
}

ProbeSample probe(std::int64_t service_id, const std::string& service_url,
                  Transport& transport, Clock& clock, int timeout_ms) {
  ProbeSample s;
  s.service_id = service_id;
  s.timestamp = clock.now_ms();
  std::string url = service_url;
  try {
    Url u = Url::parse(service_url);
    u.set_query("request", "GetCapabilities");
    url = u.str();
  } catch (const MalformedUrl&) {
  }
  std::int64_t start = clock.now_ms();
  try {
    HttpResponse r = transport.request(url, timeout_ms);
    s.latency_ms = clock.now_ms() - start;
    s.http_status = r.status;
  } catch (const FetchFailed&) {
    // failure is data: latency stays absent
  }
  return s;
}

}  // namespace atmocat
