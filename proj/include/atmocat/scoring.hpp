#pragma once

#include <vector>

#include "atmocat/caps.hpp"
#include "atmocat/store.hpp"
#include "atmocat/transport.hpp"

namespace atmocat {

struct ScoreWeights {
  double completeness = 0.5;
  double latency = 0.5;
};

struct ScoreBreakdown {
  double completeness = 0;
  double latency_score = 0;
  double combined = 0;
  ScoreWeights weights;
};

// Fields checked for metadata completeness, 1/6 each:
// title, abstract, keywords, bounding box, supported SRS, contact/provider.
struct CompletenessView {
  bool has_title = false;
  bool has_abstract = false;
  bool has_keywords = false;
  bool has_bbox = false;
  bool has_srs = false;
  bool has_contact = false;
};

CompletenessView completeness_view(const ServiceDraft& svc,
                                   const std::vector<LayerDraft>& layers);
CompletenessView completeness_view(const CatalogueRecord& record);

double completeness(const CompletenessView& v);

// 2^(-median/halfLife) over the most recent up-to-10 samples; a failed
// probe counts as 4x the half-life. Throws NoSamples.
double latency_score(const std::vector<ProbeSample>& recent_first,
                     double half_life_ms);

// combined = wC*completeness + wL*latency. Throws InvalidWeights unless the
// weights are non-negative and sum to 1.
ScoreBreakdown combine_score(double completeness, double latency_score,
                             const ScoreWeights& w);

// One GetCapabilities round trip; failures become failure samples, not errors.
ProbeSample probe(std::int64_t service_id, const std::string& service_url,
                  Transport& transport, Clock& clock, int timeout_ms = 10000);

}  // namespace atmocat
