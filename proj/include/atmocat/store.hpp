#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "atmocat/caps.hpp"

struct sqlite3;

namespace atmocat {

struct GeoLocation {
  double latitude = 0;
  double longitude = 0;
  std::string country = "unknown";
};

struct ServiceRecord {
  std::int64_t service_id = 0;
  std::string url;
  ServiceType service_type = ServiceType::WMS;
  std::string version;
  std::string title;
  std::string abstract_;
  std::vector<std::string> keywords;
  std::string provider_name;
  double latitude = 0;
  double longitude = 0;
  std::string country = "unknown";
  double score = 0;
  std::int64_t discovered_at = 0;
  std::int64_t last_probed_at = 0;
};

struct LayerRecord {
  std::int64_t layer_id = 0;
  std::int64_t service_id = 0;
  std::string name;
  std::string url;  // retrieval endpoint
  std::vector<std::string> supported_srs;
  std::optional<BoundingBox> bbox;
  std::string symbol;  // style JSON (opacity, color, size); empty = none
  double quality_score = 0;
  std::string owner_user_id;  // empty = unowned
};

struct LayerMetadata {
  std::int64_t layer_id = 0;
  std::string title;
  std::string abstract_;
  std::vector<std::string> keywords;
  std::vector<std::string> formats;
  std::optional<std::pair<std::string, std::string>> time_extent;
};

// One searchable catalogue row: a layer with its service fields inlined.
struct CatalogueRecord {
  LayerRecord layer;
  LayerMetadata meta;
  ServiceRecord service;
};

struct UserProfile {
  std::string user_id;  // email
  std::string full_name;
  std::string institution;
};

struct WorkspaceEntry {
  std::int64_t layer_id = 0;
  int display_order = 0;
  std::string style_override;  // JSON text; empty = none
};

struct Workspace {
  std::int64_t workspace_id = 0;
  std::string user_id;
  std::string name;
  std::string default_srs;
  std::vector<WorkspaceEntry> entries;  // kept sorted by display_order
};

struct AnalysisIo {
  std::string name;
  std::string data_kind;  // RasterCoverage | VectorFeatures | Table | Scalar
};

struct AnalysisProfile {
  std::int64_t profile_id = 0;
  std::string service_name;
  std::string service_url;
  std::vector<AnalysisIo> inputs;
  std::vector<AnalysisIo> outputs;
  std::string rule_description;
  std::vector<std::string> constraints;
  std::optional<std::int64_t> bound_layer_id;
};

struct ProbeSample {
  std::int64_t service_id = 0;
  std::int64_t timestamp = 0;
  std::optional<std::int64_t> latency_ms;  // absent = failed probe
  std::optional<int> http_status;
};

// Workspace <-> normative JSON document. load rejects unknown keys.
std::string workspace_to_json(const Workspace& w);
Workspace workspace_from_json(const std::string& json_text);

// Embedded catalogue over SQLite. Single writer, snapshot-consistent reads;
// every multi-row mutation runs in one transaction.
class CatalogueStore {
 public:
  explicit CatalogueStore(const std::string& path);  // ":memory:" works
  ~CatalogueStore();
  CatalogueStore(const CatalogueStore&) = delete;
  CatalogueStore& operator=(const CatalogueStore&) = delete;

  // Insert-or-update keyed on capabilities URL; layers keyed on
  // (service_id, name). Idempotent for identical input.
  std::int64_t upsert_service(const ServiceDraft& draft, const GeoLocation& geo,
                              const std::vector<LayerDraft>& layers,
                              std::int64_t now_ms = 0);

  std::vector<ServiceRecord> list_services() const;
  std::optional<ServiceRecord> find_service_by_url(const std::string& url) const;
  std::vector<CatalogueRecord> list_records() const;
  std::optional<CatalogueRecord> find_record(std::int64_t layer_id) const;
  std::int64_t service_count() const;
  std::int64_t layer_count() const;

  // Cascades to layer_metadata; refused while any workspace links the layer.
  void delete_layer(std::int64_t layer_id);

  std::string register_user(const std::string& email, const std::string& full_name,
                            const std::string& institution, const std::string& password);
  bool authenticate(const std::string& email, const std::string& password) const;
  std::optional<UserProfile> find_user(const std::string& email) const;

  std::int64_t create_workspace(const std::string& user_id, const std::string& name,
                                const std::string& default_srs);
  std::vector<Workspace> list_workspaces(const std::string& user_id) const;
  Workspace get_workspace(std::int64_t workspace_id) const;
  Workspace add_layer_to_workspace(std::int64_t workspace_id, std::int64_t layer_id,
                                   int display_order,
                                   const std::string& style_override = "");
  Workspace remove_layer_from_workspace(std::int64_t workspace_id,
                                        std::int64_t layer_id);
  std::string serialize_workspace(std::int64_t workspace_id) const;

  std::int64_t add_analysis_profile(const AnalysisProfile& p);
  std::vector<AnalysisProfile> list_analysis_profiles() const;

  void record_probe_sample(const ProbeSample& s);
  std::vector<ProbeSample> recent_samples(std::int64_t service_id, int limit) const;
  void set_service_score(std::int64_t service_id, double score,
                         std::int64_t probed_at_ms = 0);
  void set_layer_score(std::int64_t layer_id, double score);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Salted PBKDF2 hash; verify parses the stored encoding.
std::string hash_password(const std::string& password);
bool verify_password(const std::string& password, const std::string& stored);

bool valid_email(const std::string& s);

}  // namespace atmocat
