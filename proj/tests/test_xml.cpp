#include <doctest.h>

#include "atmocat/errors.hpp"
#include "atmocat/xml.hpp"
#include "test_util.hpp"

using namespace atmocat;

TEST_CASE("basic dom construction") {
  auto root = parse_xml("<a x='1'><b>hi</b><b>there</b><c:d/></a>");
  CHECK(root->name == "a");
  CHECK(root->attr("x") == "1");
  CHECK(root->children.size() == 3);
  CHECK(root->children_named("b").size() == 2);
  CHECK(root->child_text("b") == "hi");
  CHECK(root->children[2]->local_name() == "d");
  CHECK(root->children[0]->parent == root.get());
}

TEST_CASE("attribute lookup is case-insensitive and prefix-agnostic") {
  auto root = parse_xml("<r xsi:Foo='v' Bar='w'/>");
  CHECK(root->attr("foo") == "v");
  CHECK(root->attr("BAR") == "w");
  CHECK(root->attr("baz") == "");
}

TEST_CASE("malformed documents throw MalformedXml") {
  CHECK_THROWS_AS(parse_xml("<a><b></a>"), MalformedXml);
  CHECK_THROWS_AS(parse_xml("not xml"), MalformedXml);
  CHECK_THROWS_AS(parse_xml(""), MalformedXml);
  CHECK_THROWS_AS(parse_xml(testutil::fixture("capabilities/truncated.xml")),
                  MalformedXml);
}

TEST_CASE("entity declarations are rejected, not expanded") {
  const char* bomb =
      "<?xml version='1.0'?><!DOCTYPE a [<!ENTITY x 'yyyyyyyy'>]><a>&x;</a>";
  CHECK_THROWS_AS(parse_xml(bomb), MalformedXml);
}

TEST_CASE("size cap") {
  std::string big = "<a>" + std::string(100, 'x') + "</a>";
  CHECK_THROWS_AS(parse_xml(big, 10), MalformedXml);
}

TEST_CASE("looks_like_xml") {
  CHECK(looks_like_xml("<?xml version='1.0'?><a/>"));
  CHECK(looks_like_xml("  \n<a/>"));
  CHECK(looks_like_xml("\xEF\xBB\xBF<a/>"));
  CHECK(!looks_like_xml("hello <a/>"));
  CHECK(!looks_like_xml(""));
}

TEST_CASE("sniff_root_name works on truncated prefixes") {
  CHECK(sniff_root_name("<?xml version='1.0'?>\n<WMS_Capabilities version=") ==
        "WMS_Capabilities");
  // namespace prefixes are stripped: classification keys on local names
  CHECK(sniff_root_name("<!-- c --><wfs:WFS_Capabilities ") == "WFS_Capabilities");
  CHECK(sniff_root_name("<ServiceExceptionReport>") == "ServiceExceptionReport");
  CHECK(sniff_root_name("plain text") == "");
  CHECK(sniff_root_name("<") == "");
}

TEST_CASE("trim_copy") {
  CHECK(trim_copy("  a b \n\t") == "a b");
  CHECK(trim_copy("") == "");
  CHECK(trim_copy(" \r\n ") == "");
}
