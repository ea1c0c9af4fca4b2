#include "atmocat/caps.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <sstream>

#include "atmocat/errors.hpp"
#include "atmocat/xml.hpp"

namespace atmocat {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::optional<double> to_double(const std::string& s) {
  std::string t = trim_copy(s);
  if (t.empty()) return std::nullopt;
  try {
    std::size_t pos = 0;
    double v = std::stod(t, &pos);
    if (pos != t.size()) return std::nullopt;
    return v;
  } catch (...) {
    return std::nullopt;
  }
}

// Namespace hint for bare <Capabilities> roots (WCS 2.x, CSW, WPS share the
// local name and differ only in namespace).
std::optional<ServiceType> type_from_namespaces(const XmlNode& root) {
  for (const auto& [k, v] : root.attrs) {
    if (k.rfind("xmlns", 0) != 0) continue;
    std::string ns = lower(v);
    if (ns.find("/wcs") != std::string::npos) return ServiceType::WCS;
    if (ns.find("/cat/csw") != std::string::npos || ns.find("csw") != std::string::npos)
      return ServiceType::CSW;
    if (ns.find("/wps") != std::string::npos) return ServiceType::WPS;
  }
  return std::nullopt;
}

std::pair<ServiceType, std::string> detect_from_root(const XmlNode& root) {
  std::string local = lower(root.local_name());
  std::string version = root.attr("version");
  if (local == "wms_capabilities" || local == "wmt_ms_capabilities")
    return {ServiceType::WMS, version};
  if (local == "wfs_capabilities") return {ServiceType::WFS, version};
  if (local == "wcs_capabilities") return {ServiceType::WCS, version};
  if (local == "capabilities") {
    if (auto t = type_from_namespaces(root)) return {*t, version};
  }
  throw NotCapabilities("unrecognized root element: " + root.name);
}

void collect_keywords(const XmlNode* list, std::vector<std::string>& out) {
  if (!list) return;
  for (const auto& kw : list->children_named("Keyword")) {
    std::string k = trim_copy(kw->text);
    if (!k.empty() && std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
}

std::optional<BoundingBox> sane(std::optional<BoundingBox> b) {
  if (b && !b->valid()) return std::nullopt;
  return b;
}

// --- WMS -------------------------------------------------------------------

std::optional<BoundingBox> wms_layer_bbox(const XmlNode& layer) {
  if (const XmlNode* geo = layer.first_child("EX_GeographicBoundingBox")) {
    auto w = to_double(geo->child_text("westBoundLongitude"));
    auto e = to_double(geo->child_text("eastBoundLongitude"));
    auto s = to_double(geo->child_text("southBoundLatitude"));
    auto n = to_double(geo->child_text("northBoundLatitude"));
    if (w && e && s && n) return BoundingBox{*w, *s, *e, *n};
  }
  if (const XmlNode* ll = layer.first_child("LatLonBoundingBox")) {
    auto minx = to_double(ll->attr("minx"));
    auto miny = to_double(ll->attr("miny"));
    auto maxx = to_double(ll->attr("maxx"));
    auto maxy = to_double(ll->attr("maxy"));
    if (minx && miny && maxx && maxy) return BoundingBox{*minx, *miny, *maxx, *maxy};
  }
  return std::nullopt;
}

std::optional<std::pair<std::string, std::string>> wms_time_extent(const XmlNode& layer) {
  for (const char* tag : {"Dimension", "Extent"}) {
    for (const XmlNode* d : layer.children_named(tag)) {
      if (lower(d->attr("name")) != "time") continue;
      std::string v = trim_copy(d->text);
      if (v.empty()) continue;
      std::size_t slash = v.find('/');
      if (slash == std::string::npos) return std::make_pair(v, v);
      std::string start = v.substr(0, slash);
      std::string rest = v.substr(slash + 1);
      std::size_t slash2 = rest.find('/');
      std::string end = (slash2 == std::string::npos) ? rest : rest.substr(0, slash2);
      return std::make_pair(start, end);
    }
  }
  return std::nullopt;
}

struct WmsInherited {
  std::optional<BoundingBox> bbox;
  std::vector<std::string> srs;
  std::optional<std::pair<std::string, std::string>> time;
};

void walk_wms_layers(const XmlNode& layer, WmsInherited inherited,
                     const std::vector<std::string>& formats,
                     std::vector<LayerDraft>& out) {
  if (auto b = wms_layer_bbox(layer)) inherited.bbox = b;
  for (const char* tag : {"SRS", "CRS"}) {
    for (const XmlNode* s : layer.children_named(tag)) {
      std::string v = trim_copy(s->text);
      if (!v.empty() &&
          std::find(inherited.srs.begin(), inherited.srs.end(), v) == inherited.srs.end())
        inherited.srs.push_back(v);
    }
  }
  if (auto t = wms_time_extent(layer)) inherited.time = t;

  auto children = layer.children_named("Layer");
  if (children.empty()) {
    std::string name = layer.child_text("Name");
    if (name.empty()) return;  // unnamed leaves are not addressable
    LayerDraft d;
    d.name = name;
    d.title = layer.child_text("Title");
    d.abstract_ = layer.child_text("Abstract");
    collect_keywords(layer.first_child("KeywordList"), d.keywords);
    d.bbox = sane(inherited.bbox);
    d.supported_srs = inherited.srs;
    d.formats = formats;
    d.time_extent = inherited.time;
    out.push_back(std::move(d));
    return;
  }
  for (const XmlNode* c : children) walk_wms_layers(*c, inherited, formats, out);
}

std::vector<std::string> wms_getmap_formats(const XmlNode& root) {
  std::vector<std::string> formats;
  if (const XmlNode* cap = root.first_child("Capability"))
    if (const XmlNode* req = cap->first_child("Request"))
      if (const XmlNode* gm = req->first_child("GetMap"))
        for (const XmlNode* f : gm->children_named("Format")) {
          std::string v = trim_copy(f->text);
          if (!v.empty()) formats.push_back(v);
        }
  return formats;
}

void parse_wms(const XmlNode& root, ServiceDraft& svc, std::vector<LayerDraft>& layers) {
  if (const XmlNode* service = root.first_child("Service")) {
    svc.title = service->child_text("Title");
    svc.abstract_ = service->child_text("Abstract");
    collect_keywords(service->first_child("KeywordList"), svc.keywords);
    if (const XmlNode* ci = service->first_child("ContactInformation")) {
      if (const XmlNode* cp = ci->first_child("ContactPersonPrimary")) {
        svc.provider_name = cp->child_text("ContactOrganization");
        svc.contact = cp->child_text("ContactPerson");
      }
      if (svc.contact.empty()) svc.contact = ci->child_text("ContactElectronicMailAddress");
    }
  }
  auto formats = wms_getmap_formats(root);
  if (const XmlNode* cap = root.first_child("Capability"))
    for (const XmlNode* top : cap->children_named("Layer"))
      walk_wms_layers(*top, WmsInherited{}, formats, layers);
}

// --- OWS Common identification (WFS, WCS 2.x, CSW, WPS) --------------------

void parse_ows_identification(const XmlNode& root, ServiceDraft& svc) {
  if (const XmlNode* ident = root.first_child("ServiceIdentification")) {
    svc.title = ident->child_text("Title");
    svc.abstract_ = ident->child_text("Abstract");
    collect_keywords(ident->first_child("Keywords"), svc.keywords);
  }
  if (const XmlNode* prov = root.first_child("ServiceProvider")) {
    svc.provider_name = prov->child_text("ProviderName");
    if (const XmlNode* contact = prov->first_child("ServiceContact"))
      svc.contact = contact->child_text("IndividualName");
  }
}

std::optional<BoundingBox> ows_wgs84_bbox(const XmlNode& parent) {
  const XmlNode* bb = parent.first_child("WGS84BoundingBox");
  if (!bb) bb = parent.first_child("BoundingBox");
  if (!bb) return std::nullopt;
  std::istringstream lc(bb->child_text("LowerCorner")), uc(bb->child_text("UpperCorner"));
  double lx, ly, ux, uy;
  if (!(lc >> lx >> ly) || !(uc >> ux >> uy)) return std::nullopt;
  return BoundingBox{lx, ly, ux, uy};
}

void parse_wfs(const XmlNode& root, ServiceDraft& svc, std::vector<LayerDraft>& layers) {
  parse_ows_identification(root, svc);
  // WFS 1.0-style <Service> fallback
  if (svc.title.empty())
    if (const XmlNode* service = root.first_child("Service")) {
      svc.title = service->child_text("Title");
      svc.abstract_ = service->child_text("Abstract");
    }
  const XmlNode* list = root.first_child("FeatureTypeList");
  if (!list) return;
  for (const XmlNode* ft : list->children_named("FeatureType")) {
    LayerDraft d;
    d.name = ft->child_text("Name");
    if (d.name.empty()) continue;
    d.title = ft->child_text("Title");
    d.abstract_ = ft->child_text("Abstract");
    collect_keywords(ft->first_child("Keywords"), d.keywords);
    for (const char* tag : {"DefaultSRS", "DefaultCRS", "SRS", "OtherSRS", "OtherCRS"})
      for (const XmlNode* s : ft->children_named(tag)) {
        std::string v = trim_copy(s->text);
        if (!v.empty() &&
            std::find(d.supported_srs.begin(), d.supported_srs.end(), v) ==
                d.supported_srs.end())
          d.supported_srs.push_back(v);
      }
    for (const XmlNode* f : ft->children_named("OutputFormats"))
      for (const XmlNode* fmt : f->children_named("Format")) {
        std::string v = trim_copy(fmt->text);
        if (!v.empty()) d.formats.push_back(v);
      }
    d.bbox = sane(ows_wgs84_bbox(*ft));
    layers.push_back(std::move(d));
  }
}

void parse_wcs(const XmlNode& root, const std::string& version, ServiceDraft& svc,
               std::vector<LayerDraft>& layers) {
  if (lower(root.local_name()) == "wcs_capabilities") {
    // WCS 1.0.0
    if (const XmlNode* service = root.first_child("Service")) {
      svc.title = service->child_text("label");
      if (svc.title.empty()) svc.title = service->child_text("name");
      svc.abstract_ = service->child_text("description");
      if (const XmlNode* kw = service->first_child("keywords"))
        for (const XmlNode* k : kw->children_named("keyword")) {
          std::string v = trim_copy(k->text);
          if (!v.empty()) svc.keywords.push_back(v);
        }
      if (const XmlNode* rp = service->first_child("responsibleParty"))
        svc.provider_name = rp->child_text("organisationName");
    }
    if (const XmlNode* content = root.first_child("ContentMetadata"))
      for (const XmlNode* cov : content->children_named("CoverageOfferingBrief")) {
        LayerDraft d;
        d.name = cov->child_text("name");
        if (d.name.empty()) continue;
        d.title = cov->child_text("label");
        d.abstract_ = cov->child_text("description");
        if (const XmlNode* env = cov->first_child("lonLatEnvelope")) {
          auto poses = env->children_named("pos");
          if (poses.size() >= 2) {
            std::istringstream a(trim_copy(poses[0]->text)), b(trim_copy(poses[1]->text));
            double lx, ly, ux, uy;
            if ((a >> lx >> ly) && (b >> ux >> uy))
              d.bbox = sane(BoundingBox{lx, ly, ux, uy});
          }
        }
        layers.push_back(std::move(d));
      }
    return;
  }
  // WCS 2.x
  (void)version;
  parse_ows_identification(root, svc);
  if (const XmlNode* contents = root.first_child("Contents"))
    for (const XmlNode* cov : contents->children_named("CoverageSummary")) {
      LayerDraft d;
      d.name = cov->child_text("CoverageId");
      if (d.name.empty()) continue;
      d.title = cov->child_text("Title");
      d.abstract_ = cov->child_text("Abstract");
      d.bbox = sane(ows_wgs84_bbox(*cov));
      layers.push_back(std::move(d));
    }
}

bool supported_version(ServiceType t, const std::string& v) {
  switch (t) {
    case ServiceType::WMS: return v == "1.1.1" || v == "1.3.0";
    case ServiceType::WFS: return v == "1.1.0" || v == "2.0.0";
    case ServiceType::WCS: return v == "1.0.0" || v == "2.0.1";
    case ServiceType::CSW: return v == "2.0.2";
    case ServiceType::WPS: return v == "1.0.0";
  }
  return false;
}

}  // namespace

const char* to_string(ServiceType t) {
  switch (t) {
    case ServiceType::WMS: return "WMS";
    case ServiceType::WFS: return "WFS";
    case ServiceType::WCS: return "WCS";
    case ServiceType::CSW: return "CSW";
    case ServiceType::WPS: return "WPS";
  }
  return "WMS";
}

std::optional<ServiceType> service_type_from(std::string_view s) {
  std::string u(s);
  std::transform(u.begin(), u.end(), u.begin(),
                 [](unsigned char c) { return std::toupper(c); });
  if (u == "WMS") return ServiceType::WMS;
  if (u == "WFS") return ServiceType::WFS;
  if (u == "WCS") return ServiceType::WCS;
  if (u == "CSW") return ServiceType::CSW;
  if (u == "WPS") return ServiceType::WPS;
  return std::nullopt;
}

std::pair<ServiceType, std::string> detect_service_kind(std::string_view xml) {
  auto root = parse_xml(xml);
  return detect_from_root(*root);
}

std::pair<ServiceDraft, std::vector<LayerDraft>> parse_capabilities(
    std::string_view xml, const std::string& source_url) {
  auto root = parse_xml(xml);
  auto [type, version] = detect_from_root(*root);
  if (!supported_version(type, version))
    throw UnsupportedVersion(std::string(to_string(type)) + " version '" + version +
                             "' is not supported");

  ServiceDraft svc;
  svc.service_type = type;
  svc.version = version;
  svc.capabilities_url = source_url;
  std::vector<LayerDraft> layers;

  switch (type) {
    case ServiceType::WMS: parse_wms(*root, svc, layers); break;
    case ServiceType::WFS: parse_wfs(*root, svc, layers); break;
    case ServiceType::WCS: parse_wcs(*root, version, svc, layers); break;
    case ServiceType::CSW:
    case ServiceType::WPS: parse_ows_identification(*root, svc); break;
  }
  return {std::move(svc), std::move(layers)};
}

}  // namespace atmocat
