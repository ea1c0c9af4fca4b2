#include <doctest.h>

#include "atmocat/classify.hpp"
#include "test_util.hpp"

using namespace atmocat;

TEST_CASE("capabilities roots classify regardless of content type") {
  CHECK(classify_response("text/plain", "<WMS_Capabilities version='1.3.0'>") ==
        DocKind::OwsCapabilities);
  CHECK(classify_response("", "<wfs:WFS_Capabilities xmlns:wfs='x'>") ==
        DocKind::OwsCapabilities);
  CHECK(classify_response("text/html", "<WMT_MS_Capabilities>") ==
        DocKind::OwsCapabilities);
  CHECK(classify_response("application/xml", "<csw:Capabilities version='2.0.2'>") ==
        DocKind::OwsCapabilities);
}

TEST_CASE("exception reports classify as exceptions") {
  CHECK(classify_response("application/xml", "<ServiceExceptionReport>") ==
        DocKind::OwsException);
  CHECK(classify_response("text/xml", "<ows:ExceptionReport xmlns:ows='x'>") ==
        DocKind::OwsException);
  CHECK(classify_response("application/vnd.ogc.se_xml",
                          testutil::fixture("capabilities/exception.xml")) ==
        DocKind::OwsException);
}

TEST_CASE("html detection: sniff beats header") {
  CHECK(classify_response("text/html", "<html><body>x</body></html>") == DocKind::Html);
  CHECK(classify_response("text/plain", "<!doctype html><html>") == DocKind::Html);
  // header says html but body is a capabilities doc: body wins
  CHECK(classify_response("text/html",
                          testutil::fixture("capabilities/wms_111.xml")) ==
        DocKind::OwsCapabilities);
}

TEST_CASE("header fallback when the body is inconclusive") {
  CHECK(classify_response("text/html; charset=utf-8", "short fragment") == DocKind::Html);
  CHECK(classify_response("application/json", "{}") == DocKind::Other);
  CHECK(classify_response("", "plain text") == DocKind::Other);
}

TEST_CASE("truncated capabilities prefixes still classify by root sniff") {
  std::string full = testutil::fixture("capabilities/wms_130_nested.xml");
  CHECK(classify_response("application/xml", full.substr(0, 120)) ==
        DocKind::OwsCapabilities);
}

TEST_CASE("to_string covers all kinds") {
  CHECK(std::string(to_string(DocKind::Html)) == "html");
  CHECK(std::string(to_string(DocKind::OwsCapabilities)) == "ows-capabilities");
  CHECK(std::string(to_string(DocKind::OwsException)) == "ows-exception");
  CHECK(std::string(to_string(DocKind::Other)) == "other");
}
