#include "atmocat/store.hpp"

#include <sqlite3.h>
#include <zlib.h>
#include <openssl/evp.h>
#include <openssl/rand.h>

#include <algorithm>
#include <cstring>
#include <set>

#include <json.hpp>

#include "atmocat/errors.hpp"

using nlohmann::json;

namespace atmocat {

namespace {

constexpr int kPbkdf2Iters = 20000;
constexpr std::size_t kSaltLen = 16;
constexpr std::size_t kHashLen = 32;
constexpr std::size_t kCompressThreshold = 512;

std::string to_hex(const unsigned char* data, std::size_t n) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    out += digits[data[i] >> 4];
    out += digits[data[i] & 0xf];
  }
  return out;
}

std::vector<unsigned char> from_hex(const std::string& s) {
  auto nib = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
  };
  std::vector<unsigned char> out;
  if (s.size() % 2) return out;
  for (std::size_t i = 0; i < s.size(); i += 2) {
    int hi = nib(s[i]), lo = nib(s[i + 1]);
    if (hi < 0 || lo < 0) return {};
    out.push_back(static_cast<unsigned char>(hi << 4 | lo));
  }
  return out;
}

json strings_to_json(const std::vector<std::string>& v) { return json(v); }

std::vector<std::string> strings_from_json(const std::string& text) {
  if (text.empty()) return {};
  auto j = json::parse(text, nullptr, false);
  if (!j.is_array()) return {};
  std::vector<std::string> out;
  for (const auto& e : j)
    if (e.is_string()) out.push_back(e.get<std::string>());
  return out;
}

std::string bbox_to_json(const std::optional<BoundingBox>& b) {
  if (!b) return "";
  return json{{"minLon", b->min_lon}, {"minLat", b->min_lat},
              {"maxLon", b->max_lon}, {"maxLat", b->max_lat}}.dump();
}

std::optional<BoundingBox> bbox_from_json(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto j = json::parse(text, nullptr, false);
  if (!j.is_object()) return std::nullopt;
  try {
    return BoundingBox{j.at("minLon").get<double>(), j.at("minLat").get<double>(),
                       j.at("maxLon").get<double>(), j.at("maxLat").get<double>()};
  } catch (...) {
    return std::nullopt;
  }
}

std::string time_to_json(const std::optional<std::pair<std::string, std::string>>& t) {
  if (!t) return "";
  return json{{"start", t->first}, {"end", t->second}}.dump();
}

std::optional<std::pair<std::string, std::string>> time_from_json(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto j = json::parse(text, nullptr, false);
  if (!j.is_object()) return std::nullopt;
  try {
    return std::make_pair(j.at("start").get<std::string>(), j.at("end").get<std::string>());
  } catch (...) {
    return std::nullopt;
  }
}

// workspacedata codec: leading flag byte, 0x00 = plain JSON, 0x01 = DEFLATE.
std::string encode_workspacedata(const std::string& json_text) {
  if (json_text.size() < kCompressThreshold) return std::string(1, '\x00') + json_text;
  uLongf bound = compressBound(static_cast<uLong>(json_text.size()));
  std::string out(1 + sizeof(std::uint32_t) + bound, '\0');
  out[0] = '\x01';
  std::uint32_t orig = static_cast<std::uint32_t>(json_text.size());
  std::memcpy(&out[1], &orig, sizeof(orig));
  if (compress(reinterpret_cast<Bytef*>(&out[1 + sizeof(orig)]), &bound,
               reinterpret_cast<const Bytef*>(json_text.data()),
               static_cast<uLong>(json_text.size())) != Z_OK)
    throw StorageFailure("deflate failed");
  out.resize(1 + sizeof(orig) + bound);
  return out;
}

std::string decode_workspacedata(const std::string& blob) {
  if (blob.empty()) throw StorageFailure("empty workspacedata");
  if (blob[0] == '\x00') return blob.substr(1);
  if (blob[0] != '\x01' || blob.size() < 1 + sizeof(std::uint32_t))
    throw StorageFailure("bad workspacedata header");
  std::uint32_t orig;
  std::memcpy(&orig, &blob[1], sizeof(orig));
  std::string out(orig, '\0');
  uLongf len = orig;
  if (uncompress(reinterpret_cast<Bytef*>(out.data()), &len,
                 reinterpret_cast<const Bytef*>(blob.data() + 1 + sizeof(orig)),
                 static_cast<uLong>(blob.size() - 1 - sizeof(orig))) != Z_OK ||
      len != orig)
    throw StorageFailure("inflate failed");
  return out;
}

}  // namespace

std::string hash_password(const std::string& password) {
  unsigned char salt[kSaltLen], hash[kHashLen];
  if (RAND_bytes(salt, sizeof(salt)) != 1) throw StorageFailure("entropy unavailable");
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt,
                        sizeof(salt), kPbkdf2Iters, EVP_sha256(), sizeof(hash),
                        hash) != 1)
    throw StorageFailure("pbkdf2 failed");
  return "pbkdf2-sha256$" + std::to_string(kPbkdf2Iters) + "$" +
         to_hex(salt, sizeof(salt)) + "$" + to_hex(hash, sizeof(hash));
}

bool verify_password(const std::string& password, const std::string& stored) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    auto pos = stored.find('$', start);
    parts.push_back(stored.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() != 4 || parts[0] != "pbkdf2-sha256") return false;
  int iters = 0;
  try {
    iters = std::stoi(parts[1]);
  } catch (...) {
    return false;
  }
  auto salt = from_hex(parts[2]);
  auto want = from_hex(parts[3]);
  if (salt.empty() || want.empty()) return false;
  std::vector<unsigned char> got(want.size());
  if (PKCS5_PBKDF2_HMAC(password.data(), static_cast<int>(password.size()), salt.data(),
                        static_cast<int>(salt.size()), iters, EVP_sha256(),
                        static_cast<int>(got.size()), got.data()) != 1)
    return false;
  // constant-time compare
  unsigned char diff = 0;
  for (std::size_t i = 0; i < want.size(); ++i) diff |= want[i] ^ got[i];
  return diff == 0;
}

bool valid_email(const std::string& s) {
  auto at = s.find('@');
  if (at == std::string::npos || at == 0 || at + 1 >= s.size()) return false;
  if (s.find('@', at + 1) != std::string::npos) return false;
  std::string domain = s.substr(at + 1);
  auto dot = domain.find('.');
  if (dot == std::string::npos || dot == 0 || dot + 1 >= domain.size()) return false;
  return s.find(' ') == std::string::npos;
}

std::string workspace_to_json(const Workspace& w) {
  json layers = json::array();
  auto entries = w.entries;
  std::sort(entries.begin(), entries.end(),
            [](const auto& a, const auto& b) { return a.display_order < b.display_order; });
  for (const auto& e : entries) {
    json item{{"layerId", e.layer_id}, {"displayOrder", e.display_order}};
    if (!e.style_override.empty()) item["styleOverride"] = e.style_override;
    layers.push_back(std::move(item));
  }
  return json{{"workspaceId", w.workspace_id},
              {"name", w.name},
              {"defaultSrs", w.default_srs},
              {"layers", layers}}
      .dump();
}

Workspace workspace_from_json(const std::string& json_text) {
  auto j = json::parse(json_text, nullptr, false);
  if (!j.is_object()) throw MalformedDocument("workspace document is not a JSON object");
  static const std::set<std::string> allowed{"workspaceId", "name", "defaultSrs", "layers"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw MalformedDocument("unknown workspace key: " + it.key());
  Workspace w;
  try {
    w.workspace_id = j.at("workspaceId").get<std::int64_t>();
    w.name = j.at("name").get<std::string>();
    w.default_srs = j.at("defaultSrs").get<std::string>();
    static const std::set<std::string> entry_allowed{"layerId", "displayOrder",
                                                     "styleOverride"};
    for (const auto& item : j.at("layers")) {
      if (!item.is_object()) throw MalformedDocument("layer entry is not an object");
      for (auto it = item.begin(); it != item.end(); ++it)
        if (!entry_allowed.count(it.key()))
          throw MalformedDocument("unknown layer entry key: " + it.key());
      WorkspaceEntry e;
      e.layer_id = item.at("layerId").get<std::int64_t>();
      e.display_order = item.at("displayOrder").get<int>();
      if (item.contains("styleOverride"))
        e.style_override = item.at("styleOverride").get<std::string>();
      w.entries.push_back(std::move(e));
    }
  } catch (const MalformedDocument&) {
    throw;
  } catch (const std::exception& e) {
    throw MalformedDocument(std::string("bad workspace document: ") + e.what());
  }
  return w;
}

// ---------------------------------------------------------------------------

namespace {

struct Stmt {
  sqlite3_stmt* p = nullptr;
  Stmt(sqlite3* db, const char* sql) {
    if (sqlite3_prepare_v2(db, sql, -1, &p, nullptr) != SQLITE_OK)
      throw StorageFailure(std::string("prepare failed: ") + sqlite3_errmsg(db));
  }
  ~Stmt() { sqlite3_finalize(p); }
  Stmt& bind(int idx, std::int64_t v) {
    sqlite3_bind_int64(p, idx, v);
    return *this;
  }
  Stmt& bind(int idx, double v) {
    sqlite3_bind_double(p, idx, v);
    return *this;
  }
  Stmt& bind(int idx, const std::string& v) {
    sqlite3_bind_text(p, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Stmt& bind_blob(int idx, const std::string& v) {
    sqlite3_bind_blob(p, idx, v.data(), static_cast<int>(v.size()), SQLITE_TRANSIENT);
    return *this;
  }
  Stmt& bind_null(int idx) {
    sqlite3_bind_null(p, idx);
    return *this;
  }
  bool step() {
    int rc = sqlite3_step(p);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw StorageFailure(std::string("step failed: ") +
                         sqlite3_errstr(rc));
  }
  std::int64_t col_i64(int i) { return sqlite3_column_int64(p, i); }
  double col_f64(int i) { return sqlite3_column_double(p, i); }
  bool col_null(int i) { return sqlite3_column_type(p, i) == SQLITE_NULL; }
  std::string col_text(int i) {
    const unsigned char* t = sqlite3_column_text(p, i);
    return t ? reinterpret_cast<const char*>(t) : "";
  }
  std::string col_blob(int i) {
    const void* b = sqlite3_column_blob(p, i);
    int n = sqlite3_column_bytes(p, i);
    return b ? std::string(static_cast<const char*>(b), n) : "";
  }
};

const char* kSchema = R"sql(
CREATE TABLE IF NOT EXISTS data_source_catalogue (
  service_id INTEGER PRIMARY KEY,
  url TEXT NOT NULL UNIQUE,
  service_type TEXT NOT NULL,
  version TEXT NOT NULL,
  title TEXT NOT NULL DEFAULT '',
  abstract TEXT NOT NULL DEFAULT '',
  keywords TEXT NOT NULL DEFAULT '[]',
  provider_name TEXT NOT NULL DEFAULT '',
  latitude REAL NOT NULL DEFAULT 0,
  longitude REAL NOT NULL DEFAULT 0,
  country TEXT NOT NULL DEFAULT 'unknown',
  score REAL NOT NULL DEFAULT 0,
  discovered_at INTEGER NOT NULL DEFAULT 0,
  last_probed_at INTEGER NOT NULL DEFAULT 0
);
CREATE TABLE IF NOT EXISTS layer (
  layer_id INTEGER PRIMARY KEY,
  service_id INTEGER NOT NULL REFERENCES data_source_catalogue(service_id),
  name TEXT NOT NULL,
  url TEXT NOT NULL DEFAULT '',
  supported_srs TEXT NOT NULL DEFAULT '[]',
  bbox TEXT,
  symbol TEXT,
  quality_score REAL NOT NULL DEFAULT 0,
  owner_user_id TEXT,
  UNIQUE(service_id, name)
);
CREATE TABLE IF NOT EXISTS layer_metadata (
  layer_id INTEGER PRIMARY KEY REFERENCES layer(layer_id),
  title TEXT NOT NULL DEFAULT '',
  abstract TEXT NOT NULL DEFAULT '',
  keywords TEXT NOT NULL DEFAULT '[]',
  formats TEXT NOT NULL DEFAULT '[]',
  time_extent TEXT
);
CREATE TABLE IF NOT EXISTS user_profile (
  user_id TEXT PRIMARY KEY,
  full_name TEXT NOT NULL DEFAULT '',
  institution TEXT NOT NULL DEFAULT '',
  password_hash TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS workspace (
  workspace_id INTEGER PRIMARY KEY,
  user_id TEXT NOT NULL REFERENCES user_profile(user_id),
  name TEXT NOT NULL,
  workspacedata BLOB NOT NULL
);
CREATE TABLE IF NOT EXISTS data_analysis (
  profile_id INTEGER PRIMARY KEY,
  service_name TEXT NOT NULL,
  service_url TEXT NOT NULL DEFAULT '',
  inputs TEXT NOT NULL,
  outputs TEXT NOT NULL,
  rule_description TEXT NOT NULL DEFAULT '',
  constraints TEXT NOT NULL DEFAULT '[]',
  bound_layer_id INTEGER
);
CREATE TABLE IF NOT EXISTS probe_sample (
  id INTEGER PRIMARY KEY,
  service_id INTEGER NOT NULL REFERENCES data_source_catalogue(service_id),
  ts INTEGER NOT NULL,
  latency_ms INTEGER,
  http_status INTEGER
);
)sql";

json io_to_json(const std::vector<AnalysisIo>& v) {
  json a = json::array();
  for (const auto& io : v) a.push_back({{"name", io.name}, {"dataKind", io.data_kind}});
  return a;
}

std::vector<AnalysisIo> io_from_json(const std::string& text) {
  std::vector<AnalysisIo> out;
  auto j = json::parse(text, nullptr, false);
  if (!j.is_array()) return out;
  for (const auto& e : j)
    out.push_back({e.value("name", ""), e.value("dataKind", "")});
  return out;
}

}  // namespace

struct CatalogueStore::Impl {
  sqlite3* db = nullptr;
  mutable std::recursive_mutex mu;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown";
      sqlite3_free(err);
      throw StorageFailure("exec failed: " + msg);
    }
  }

  ServiceRecord read_service(Stmt& s) {
    ServiceRecord r;
    r.service_id = s.col_i64(0);
    r.url = s.col_text(1);
    r.service_type = service_type_from(s.col_text(2)).value_or(ServiceType::WMS);
    r.version = s.col_text(3);
    r.title = s.col_text(4);
    r.abstract_ = s.col_text(5);
    r.keywords = strings_from_json(s.col_text(6));
    r.provider_name = s.col_text(7);
    r.latitude = s.col_f64(8);
    r.longitude = s.col_f64(9);
    r.country = s.col_text(10);
    r.score = s.col_f64(11);
    r.discovered_at = s.col_i64(12);
    r.last_probed_at = s.col_i64(13);
    return r;
  }

  Workspace read_workspace_row(Stmt& s) {
    Workspace w = workspace_from_json(decode_workspacedata(s.col_blob(2)));
    w.workspace_id = s.col_i64(0);
    w.user_id = s.col_text(1);
    return w;
  }

  void write_workspace(const Workspace& w) {
    Stmt s(db, "UPDATE workspace SET workspacedata=? WHERE workspace_id=?");
    s.bind_blob(1, encode_workspacedata(workspace_to_json(w))).bind(2, w.workspace_id);
    s.step();
  }
};

CatalogueStore::CatalogueStore(const std::string& path) : impl_(new Impl) {
  if (sqlite3_open(path.c_str(), &impl_->db) != SQLITE_OK)
    throw StorageFailure("cannot open store at " + path);
  impl_->exec("PRAGMA journal_mode=WAL; PRAGMA foreign_keys=ON;");
  impl_->exec(kSchema);
}

CatalogueStore::~CatalogueStore() {
  if (impl_ && impl_->db) sqlite3_close(impl_->db);
}

std::int64_t CatalogueStore::upsert_service(const ServiceDraft& draft,
                                            const GeoLocation& geo,
                                            const std::vector<LayerDraft>& layers,
                                            std::int64_t now_ms) {
  std::lock_guard lk(impl_->mu);
  impl_->exec("BEGIN IMMEDIATE");
  try {
    std::int64_t service_id = 0;
    {
      Stmt find(impl_->db, "SELECT service_id FROM data_source_catalogue WHERE url=?");
      find.bind(1, draft.capabilities_url);
      if (find.step()) service_id = find.col_i64(0);
    }
    if (service_id == 0) {
      Stmt ins(impl_->db,
               "INSERT INTO data_source_catalogue(url, service_type, version, title, "
               "abstract, keywords, provider_name, latitude, longitude, country, "
               "discovered_at) VALUES(?,?,?,?,?,?,?,?,?,?,?)");
      ins.bind(1, draft.capabilities_url)
          .bind(2, std::string(to_string(draft.service_type)))
          .bind(3, draft.version)
          .bind(4, draft.title)
          .bind(5, draft.abstract_)
          .bind(6, strings_to_json(draft.keywords).dump())
          .bind(7, draft.provider_name)
          .bind(8, geo.latitude)
          .bind(9, geo.longitude)
          .bind(10, geo.country)
          .bind(11, now_ms);
      ins.step();
      service_id = sqlite3_last_insert_rowid(impl_->db);
    } else {
      Stmt upd(impl_->db,
               "UPDATE data_source_catalogue SET service_type=?, version=?, title=?, "
               "abstract=?, keywords=?, provider_name=?, latitude=?, longitude=?, "
               "country=? WHERE service_id=?");
      upd.bind(1, std::string(to_string(draft.service_type)))
          .bind(2, draft.version)
          .bind(3, draft.title)
          .bind(4, draft.abstract_)
          .bind(5, strings_to_json(draft.keywords).dump())
          .bind(6, draft.provider_name)
          .bind(7, geo.latitude)
          .bind(8, geo.longitude)
          .bind(9, geo.country)
          .bind(10, service_id);
      upd.step();
    }

    for (const auto& l : layers) {
      if (l.name.empty()) continue;
      std::int64_t layer_id = 0;
      {
        Stmt find(impl_->db, "SELECT layer_id FROM layer WHERE service_id=? AND name=?");
        find.bind(1, service_id).bind(2, l.name);
        if (find.step()) layer_id = find.col_i64(0);
      }
      std::string bbox = bbox_to_json(l.bbox);
      if (layer_id == 0) {
        Stmt ins(impl_->db,
                 "INSERT INTO layer(service_id, name, url, supported_srs, bbox) "
                 "VALUES(?,?,?,?,?)");
        ins.bind(1, service_id).bind(2, l.name).bind(3, draft.capabilities_url)
            .bind(4, strings_to_json(l.supported_srs).dump());
        bbox.empty() ? ins.bind_null(5) : ins.bind(5, bbox);
        ins.step();
        layer_id = sqlite3_last_insert_rowid(impl_->db);
      } else {
        Stmt upd(impl_->db,
                 "UPDATE layer SET url=?, supported_srs=?, bbox=? WHERE layer_id=?");
        upd.bind(1, draft.capabilities_url)
            .bind(2, strings_to_json(l.supported_srs).dump());
        bbox.empty() ? upd.bind_null(3) : upd.bind(3, bbox);
        upd.bind(4, layer_id);
        upd.step();
      }
      std::string time_j = time_to_json(l.time_extent);
      Stmt meta(impl_->db,
                "INSERT INTO layer_metadata(layer_id, title, abstract, keywords, "
                "formats, time_extent) VALUES(?,?,?,?,?,?) "
                "ON CONFLICT(layer_id) DO UPDATE SET title=excluded.title, "
                "abstract=excluded.abstract, keywords=excluded.keywords, "
                "formats=excluded.formats, time_extent=excluded.time_extent");
      meta.bind(1, layer_id).bind(2, l.title).bind(3, l.abstract_)
          .bind(4, strings_to_json(l.keywords).dump())
          .bind(5, strings_to_json(l.formats).dump());
      time_j.empty() ? meta.bind_null(6) : meta.bind(6, time_j);
      meta.step();
    }
    impl_->exec("COMMIT");
    return service_id;
  } catch (...) {
    impl_->exec("ROLLBACK");
    throw;
  }
}

std::vector<ServiceRecord> CatalogueStore::list_services() const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT service_id, url, service_type, version, title, abstract, keywords, "
         "provider_name, latitude, longitude, country, score, discovered_at, "
         "last_probed_at FROM data_source_catalogue ORDER BY service_id");
  std::vector<ServiceRecord> out;
  while (s.step()) out.push_back(impl_->read_service(s));
  return out;
}

std::optional<ServiceRecord> CatalogueStore::find_service_by_url(
    const std::string& url) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT service_id, url, service_type, version, title, abstract, keywords, "
         "provider_name, latitude, longitude, country, score, discovered_at, "
         "last_probed_at FROM data_source_catalogue WHERE url=?");
  s.bind(1, url);
  if (!s.step()) return std::nullopt;
  return impl_->read_service(s);
}

namespace {
const char* kRecordSelect =
    "SELECT l.layer_id, l.service_id, l.name, l.url, l.supported_srs, l.bbox, "
    "l.symbol, l.quality_score, l.owner_user_id, "
    "m.title, m.abstract, m.keywords, m.formats, m.time_extent, "
    "s.service_id, s.url, s.service_type, s.version, s.title, s.abstract, "
    "s.keywords, s.provider_name, s.latitude, s.longitude, s.country, s.score, "
    "s.discovered_at, s.last_probed_at "
    "FROM layer l "
    "LEFT JOIN layer_metadata m ON m.layer_id = l.layer_id "
    "JOIN data_source_catalogue s ON s.service_id = l.service_id ";

CatalogueRecord read_record(Stmt& s) {
  CatalogueRecord r;
  r.layer.layer_id = s.col_i64(0);
  r.layer.service_id = s.col_i64(1);
  r.layer.name = s.col_text(2);
  r.layer.url = s.col_text(3);
  r.layer.supported_srs = strings_from_json(s.col_text(4));
  r.layer.bbox = bbox_from_json(s.col_text(5));
  r.layer.symbol = s.col_text(6);
  r.layer.quality_score = s.col_f64(7);
  r.layer.owner_user_id = s.col_text(8);
  r.meta.layer_id = r.layer.layer_id;
  r.meta.title = s.col_text(9);
  r.meta.abstract_ = s.col_text(10);
  r.meta.keywords = strings_from_json(s.col_text(11));
  r.meta.formats = strings_from_json(s.col_text(12));
  r.meta.time_extent = time_from_json(s.col_text(13));
  r.service.service_id = s.col_i64(14);
  r.service.url = s.col_text(15);
  r.service.service_type = service_type_from(s.col_text(16)).value_or(ServiceType::WMS);
  r.service.version = s.col_text(17);
  r.service.title = s.col_text(18);
  r.service.abstract_ = s.col_text(19);
  r.service.keywords = strings_from_json(s.col_text(20));
  r.service.provider_name = s.col_text(21);
  r.service.latitude = s.col_f64(22);
  r.service.longitude = s.col_f64(23);
  r.service.country = s.col_text(24);
  r.service.score = s.col_f64(25);
  r.service.discovered_at = s.col_i64(26);
  r.service.last_probed_at = s.col_i64(27);
  return r;
}
}  // namespace

std::vector<CatalogueRecord> CatalogueStore::list_records() const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, (std::string(kRecordSelect) + "ORDER BY l.layer_id").c_str());
  std::vector<CatalogueRecord> out;
  while (s.step()) out.push_back(read_record(s));
  return out;
}

std::optional<CatalogueRecord> CatalogueStore::find_record(std::int64_t layer_id) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, (std::string(kRecordSelect) + "WHERE l.layer_id=?").c_str());
  s.bind(1, layer_id);
  if (!s.step()) return std::nullopt;
  return read_record(s);
}

std::int64_t CatalogueStore::service_count() const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, "SELECT COUNT(*) FROM data_source_catalogue");
  s.step();
  return s.col_i64(0);
}

std::int64_t CatalogueStore::layer_count() const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, "SELECT COUNT(*) FROM layer");
  s.step();
  return s.col_i64(0);
}

void CatalogueStore::delete_layer(std::int64_t layer_id) {
  std::lock_guard lk(impl_->mu);
  {
    Stmt exists(impl_->db, "SELECT 1 FROM layer WHERE layer_id=?");
    exists.bind(1, layer_id);
    if (!exists.step()) throw UnknownLayer("no layer " + std::to_string(layer_id));
  }
  // refuse while any workspace still links the layer
  Stmt all(impl_->db, "SELECT workspace_id, user_id, workspacedata FROM workspace");
  while (all.step()) {
    Workspace w = impl_->read_workspace_row(all);
    for (const auto& e : w.entries)
      if (e.layer_id == layer_id)
        throw LayerInUse("layer " + std::to_string(layer_id) + " linked by workspace " +
                         std::to_string(w.workspace_id));
  }
  impl_->exec("BEGIN IMMEDIATE");
  try {
    Stmt m(impl_->db, "DELETE FROM layer_metadata WHERE layer_id=?");
    m.bind(1, layer_id);
    m.step();
    Stmt l(impl_->db, "DELETE FROM layer WHERE layer_id=?");
    l.bind(1, layer_id);
    l.step();
    impl_->exec("COMMIT");
  } catch (...) {
    impl_->exec("ROLLBACK");
    throw;
  }
}

std::string CatalogueStore::register_user(const std::string& email,
                                          const std::string& full_name,
                                          const std::string& institution,
                                          const std::string& password) {
  if (!valid_email(email)) throw InvalidEmail("not an email address: " + email);
  std::lock_guard lk(impl_->mu);
  {
    Stmt s(impl_->db, "SELECT 1 FROM user_profile WHERE user_id=?");
    s.bind(1, email);
    if (s.step()) throw DuplicateUser("already registered: " + email);
  }
  Stmt ins(impl_->db,
           "INSERT INTO user_profile(user_id, full_name, institution, password_hash) "
           "VALUES(?,?,?,?)");
  ins.bind(1, email).bind(2, full_name).bind(3, institution)
      .bind(4, hash_password(password));
  ins.step();
  return email;
}

bool CatalogueStore::authenticate(const std::string& email,
                                  const std::string& password) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, "SELECT password_hash FROM user_profile WHERE user_id=?");
  s.bind(1, email);
  if (!s.step()) return false;
  return verify_password(password, s.col_text(0));
}

std::optional<UserProfile> CatalogueStore::find_user(const std::string& email) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, "SELECT user_id, full_name, institution FROM user_profile WHERE user_id=?");
  s.bind(1, email);
  if (!s.step()) return std::nullopt;
  return UserProfile{s.col_text(0), s.col_text(1), s.col_text(2)};
}

std::int64_t CatalogueStore::create_workspace(const std::string& user_id,
                                              const std::string& name,
                                              const std::string& default_srs) {
  std::lock_guard lk(impl_->mu);
  if (!find_user(user_id)) throw UnknownUser("no such user: " + user_id);
  Workspace w;
  w.user_id = user_id;
  w.name = name;
  w.default_srs = default_srs;
  Stmt ins(impl_->db, "INSERT INTO workspace(user_id, name, workspacedata) VALUES(?,?,?)");
  ins.bind(1, user_id).bind(2, name).bind_blob(3, encode_workspacedata(workspace_to_json(w)));
  ins.step();
  std::int64_t id = sqlite3_last_insert_rowid(impl_->db);
  w.workspace_id = id;
  impl_->write_workspace(w);
  return id;
}

std::vector<Workspace> CatalogueStore::list_workspaces(const std::string& user_id) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT workspace_id, user_id, workspacedata FROM workspace WHERE user_id=? "
         "ORDER BY workspace_id");
  s.bind(1, user_id);
  std::vector<Workspace> out;
  while (s.step()) out.push_back(impl_->read_workspace_row(s));
  return out;
}

Workspace CatalogueStore::get_workspace(std::int64_t workspace_id) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT workspace_id, user_id, workspacedata FROM workspace WHERE workspace_id=?");
  s.bind(1, workspace_id);
  if (!s.step()) throw UnknownWorkspace("no workspace " + std::to_string(workspace_id));
  return impl_->read_workspace_row(s);
}

Workspace CatalogueStore::add_layer_to_workspace(std::int64_t workspace_id,
                                                 std::int64_t layer_id, int display_order,
                                                 const std::string& style_override) {
  std::lock_guard lk(impl_->mu);
  Workspace w = get_workspace(workspace_id);
  {
    Stmt exists(impl_->db, "SELECT 1 FROM layer WHERE layer_id=?");
    exists.bind(1, layer_id);
    if (!exists.step()) throw UnknownLayer("no layer " + std::to_string(layer_id));
  }
  for (const auto& e : w.entries)
    if (e.display_order == display_order)
      throw DisplayOrderConflict("display order " + std::to_string(display_order) +
                                 " already used in workspace " +
                                 std::to_string(workspace_id));
  w.entries.push_back({layer_id, display_order, style_override});
  std::sort(w.entries.begin(), w.entries.end(),
            [](const auto& a, const auto& b) { return a.display_order < b.display_order; });
  impl_->write_workspace(w);
  return w;
}

Workspace CatalogueStore::remove_layer_from_workspace(std::int64_t workspace_id,
                                                      std::int64_t layer_id) {
  std::lock_guard lk(impl_->mu);
  Workspace w = get_workspace(workspace_id);
  auto it = std::find_if(w.entries.begin(), w.entries.end(),
                         [&](const auto& e) { return e.layer_id == layer_id; });
  if (it == w.entries.end())
    throw LinkNotFound("layer " + std::to_string(layer_id) + " not in workspace " +
                       std::to_string(workspace_id));
  w.entries.erase(it);
  impl_->write_workspace(w);
  return w;
}

std::string CatalogueStore::serialize_workspace(std::int64_t workspace_id) const {
  return workspace_to_json(get_workspace(workspace_id));
}

std::int64_t CatalogueStore::add_analysis_profile(const AnalysisProfile& p) {
  if (p.inputs.empty() || p.outputs.empty())
    throw StorageFailure("analysis profile needs at least one input and output");
  std::lock_guard lk(impl_->mu);
  Stmt ins(impl_->db,
           "INSERT INTO data_analysis(service_name, service_url, inputs, outputs, "
           "rule_description, constraints, bound_layer_id) VALUES(?,?,?,?,?,?,?)");
  ins.bind(1, p.service_name).bind(2, p.service_url)
      .bind(3, io_to_json(p.inputs).dump()).bind(4, io_to_json(p.outputs).dump())
      .bind(5, p.rule_description).bind(6, strings_to_json(p.constraints).dump());
  p.bound_layer_id ? ins.bind(7, *p.bound_layer_id) : ins.bind_null(7);
  ins.step();
  return sqlite3_last_insert_rowid(impl_->db);
}

std::vector<AnalysisProfile> CatalogueStore::list_analysis_profiles() const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT profile_id, service_name, service_url, inputs, outputs, "
         "rule_description, constraints, bound_layer_id FROM data_analysis "
         "ORDER BY profile_id");
  std::vector<AnalysisProfile> out;
  while (s.step()) {
    AnalysisProfile p;
    p.profile_id = s.col_i64(0);
    p.service_name = s.col_text(1);
    p.service_url = s.col_text(2);
    p.inputs = io_from_json(s.col_text(3));
    p.outputs = io_from_json(s.col_text(4));
    p.rule_description = s.col_text(5);
    p.constraints = strings_from_json(s.col_text(6));
    if (!s.col_null(7)) p.bound_layer_id = s.col_i64(7);
    out.push_back(std::move(p));
  }
  return out;
}

void CatalogueStore::record_probe_sample(const ProbeSample& sample) {
  std::lock_guard lk(impl_->mu);
  Stmt ins(impl_->db,
           "INSERT INTO probe_sample(service_id, ts, latency_ms, http_status) "
           "VALUES(?,?,?,?)");
  ins.bind(1, sample.service_id).bind(2, sample.timestamp);
  sample.latency_ms ? ins.bind(3, *sample.latency_ms) : ins.bind_null(3);
  sample.http_status ? ins.bind(4, static_cast<std::int64_t>(*sample.http_status))
                     : ins.bind_null(4);
  ins.step();
}

std::vector<ProbeSample> CatalogueStore::recent_samples(std::int64_t service_id,
                                                        int limit) const {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "SELECT service_id, ts, latency_ms, http_status FROM probe_sample "
         "WHERE service_id=? ORDER BY ts DESC, id DESC LIMIT ?");
  s.bind(1, service_id).bind(2, static_cast<std::int64_t>(limit));
  std::vector<ProbeSample> out;
  while (s.step()) {
    ProbeSample p;
    p.service_id = s.col_i64(0);
    p.timestamp = s.col_i64(1);
    if (!s.col_null(2)) p.latency_ms = s.col_i64(2);
    if (!s.col_null(3)) p.http_status = static_cast<int>(s.col_i64(3));
    out.push_back(p);
  }
  return out;
}

void CatalogueStore::set_service_score(std::int64_t service_id, double score,
                                       std::int64_t probed_at_ms) {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db,
         "UPDATE data_source_catalogue SET score=?, last_probed_at=? WHERE service_id=?");
  s.bind(1, score).bind(2, probed_at_ms).bind(3, service_id);
  s.step();
}

void CatalogueStore::set_layer_score(std::int64_t layer_id, double score) {
  std::lock_guard lk(impl_->mu);
  Stmt s(impl_->db, "UPDATE layer SET quality_score=? WHERE layer_id=?");
  s.bind(1, score).bind(2, layer_id);
  s.step();
}

}  // namespace atmocat
