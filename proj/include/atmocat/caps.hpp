#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace atmocat {

enum class ServiceType { WMS, WFS, WCS, CSW, WPS };

const char* to_string(ServiceType t);
std::optional<ServiceType> service_type_from(std::string_view s);

struct BoundingBox {
  double min_lon = 0, min_lat = 0, max_lon = 0, max_lat = 0;
  bool valid() const {
    return min_lon <= max_lon && min_lat <= max_lat && min_lat >= -90 && max_lat <= 90;
  }
  bool intersects(const BoundingBox& o) const {
    // touching counts as intersecting
    return min_lon <= o.max_lon && o.min_lon <= max_lon && min_lat <= o.max_lat &&
           o.min_lat <= max_lat;
  }
};

struct ServiceDraft {
  ServiceType service_type = ServiceType::WMS;
  std::string version;
  std::string title;
  std::string abstract_;
  std::vector<std::string> keywords;
  std::string provider_name;
  std::string contact;
  std::string capabilities_url;
};

struct LayerDraft {
  std::string name;  // machine identifier, never empty
  std::string title;
  std::string abstract_;
  std::vector<std::string> keywords;
  std::optional<BoundingBox> bbox;
  std::vector<std::string> supported_srs;
  std::vector<std::string> formats;
  std::optional<std::pair<std::string, std::string>> time_extent;  // ISO-8601
};

// Root-element dispatch. Throws NotCapabilities for recognizable non-
// capabilities XML and MalformedXml when the bytes do not parse.
std::pair<ServiceType, std::string> detect_service_kind(std::string_view xml);

// Full parse: service identification plus one LayerDraft per named WMS
// layer / WFS feature type / WCS coverage. CSW and WPS carry no layers.
// Nested WMS groups are flattened to named leaves with bbox/SRS
// inheritance. Throws MalformedXml / NotCapabilities / UnsupportedVersion.
std::pair<ServiceDraft, std::vector<LayerDraft>> parse_capabilities(
    std::string_view xml, const std::string& source_url);

}  // namespace atmocat
