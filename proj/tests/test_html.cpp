#include <doctest.h>

#include "atmocat/html.hpp"
#include "test_util.hpp"

using namespace atmocat;

TEST_CASE("hrefs are extracted, resolved and normalized") {
  auto links = extract_links(
      R"(<html><body>
           <a href="/a.html">A</a>
           <A HREF='b.html'>B</A>
           <a href="http://other.example/c">C</a>
         </body></html>)",
      "http://h.example/dir/index.html");
  CHECK(links == std::set<std::string>{"http://h.example/a.html",
                                       "http://h.example/dir/b.html",
                                       "http://other.example/c"});
}

TEST_CASE("entities in hrefs are decoded") {
  auto links = extract_links(R"(<a href="/e?a=1&amp;b=2">x</a>)", "http://h/");
  CHECK(links == std::set<std::string>{"http://h/e?a=1&b=2"});
}

TEST_CASE("duplicate and fragment-only links collapse") {
  auto links = extract_links(
      R"(<a href="/p">1</a><a href="/p#top">2</a><a href="/p">3</a>)", "http://h/");
  CHECK(links == std::set<std::string>{"http://h/p"});
}

TEST_CASE("non-http and malformed references are skipped") {
  auto links = extract_links(
      R"html(<a href="mailto:a@b">m</a><a href="javascript:f()">j</a>
         <a href="">empty</a><a>none</a><a href="/ok">ok</a>)html",
      "http://h/");
  CHECK(links == std::set<std::string>{"http://h/ok"});
}

TEST_CASE("tolerates broken markup") {
  auto links = extract_links("<a href=/bare>unquoted<a href='/x", "http://h/");
  CHECK(links.count("http://h/bare") == 1);
}

TEST_CASE("fixture pages yield their expected out-links") {
  auto links = extract_links(testutil::fixture("web/pages/index.html"),
                             "http://www.geoportal.example/index.html");
  CHECK(links.count("http://www.geoportal.example/themes/ocean.html") == 1);
  CHECK(links.count("http://www.geoportal.example/about.html") == 1);
  CHECK(links.size() == 5);

  auto o1 = extract_links(testutil::fixture("web/pages/o1.html"),
                          "http://www.geoportal.example/data/o1.html");
  CHECK(o1.count("http://ocean.example.edu/endpoint?request=GetCapabilities&service=WMS") == 1);
}
