#include <regex>

#include "doctest.h"
#include "pks/dynamics.hpp"
#include "pks/render.hpp"

using namespace pks;

namespace {

long occurrences(const std::string& text, const std::string& what) {
  long n = 0;
  for (auto i = text.find(what); i != std::string::npos; i = text.find(what, i + 1)) ++n;
  return n;
}

Drawing single_vertical(double s) {
  PksParams p;
  p.vertical = measures::dirac(static_cast<long>(s));
  p.horizontal = measures::dirac(0);
  Sweep sw(p, 4, 4);
  sw.enter_vertical(1.5, s);
  Rng rng(1);
  return sw.run(rng);
}

}  // namespace

TEST_CASE("empty drawing renders the box only") {
  Drawing d;
  d.a = 3;
  d.b = 2;
  const std::string svg = render_svg(d);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(occurrences(svg, "<rect") == 1);
  CHECK(occurrences(svg, "<line") == 0);
}

TEST_CASE("line colours follow the sign of the intensity") {
  const std::string pos = render_svg(single_vertical(2));
  CHECK(occurrences(pos, "<line") == 1);
  CHECK(occurrences(pos, "stroke=\"red\"") == 1);
  const std::string neg = render_svg(single_vertical(-1));
  CHECK(occurrences(neg, "stroke=\"blue\"") == 1);
  const std::string zero = render_svg(single_vertical(0));
  CHECK(occurrences(zero, "stroke=\"gray\"") == 1);
  // Width grows with |s|.
  CHECK(pos.find("stroke-width=\"3\"") != std::string::npos);
  CHECK(neg.find("stroke-width=\"1.5\"") != std::string::npos);
}

TEST_CASE("potential mode fills each face") {
  const std::string svg = render_svg(single_vertical(2), {RenderMode::Potential});
  CHECK(occurrences(svg, "<path") == 2);
  std::regex fill("fill=\"(#[0-9a-f]{6})\" data-potential");
  std::vector<std::string> fills;
  for (std::sregex_iterator it(svg.begin(), svg.end(), fill), end; it != end; ++it) fills.push_back((*it)[1]);
  REQUIRE(fills.size() == 2);
  CHECK(fills[0] != fills[1]);
  CHECK(render_svg(single_vertical(2)) == render_svg(single_vertical(2)));
}
