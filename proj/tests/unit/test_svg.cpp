#include <doctest.h>

#include <regex>

#include "mpbo/packing.hpp"
#include "mpbo/svg_render.hpp"
#include "mpbo/wirelength.hpp"
#include "support/oracles.hpp"

using namespace mpbo;

namespace {

// pulls x/y/width/height off every <rect class="macro"> in document order
struct RectAttrs {
  double x, y, w, h;
};

std::vector<RectAttrs> macro_rects(const std::string& svg) {
  std::vector<RectAttrs> out;
  const std::regex rect_re(
      "<rect class=\"macro\" x=\"([^\"]+)\" y=\"([^\"]+)\" width=\"([^\"]+)\" "
      "height=\"([^\"]+)\"");
  for (auto it = std::sregex_iterator(svg.begin(), svg.end(), rect_re);
       it != std::sregex_iterator(); ++it) {
    out.push_back({std::stod((*it)[1]), std::stod((*it)[2]),
                   std::stod((*it)[3]), std::stod((*it)[4])});
  }
  return out;
}

}  // namespace

TEST_CASE("svg rectangles reproduce the placement exactly") {
  RngStream rng(301);
  Design d = oracle::random_design(4, 3, 3, rng);
  const SequencePair sp = random_sequence_pair(4, rng);
  REQUIRE(is_feasible(sp, d.macros, d.outline));
  const PackResult packed = pack(sp, d.macros);
  const Placement placement{packed.positions};

  const std::string svg = render_svg(d, placement);
  const auto rects = macro_rects(svg);
  REQUIRE(rects.size() == 4);
  for (int i = 0; i < 4; ++i) {
    CHECK(rects[i].x == doctest::Approx(placement.positions[i].x));
    // svg y runs downward from the outline top
    CHECK(rects[i].y == doctest::Approx(d.outline.height -
                                        (placement.positions[i].y +
                                         d.macros[i].height)));
    CHECK(rects[i].w == doctest::Approx(d.macros[i].width));
    CHECK(rects[i].h == doctest::Approx(d.macros[i].height));
  }

  // deterministic bytes
  CHECK(render_svg(d, placement) == svg);

  // one net box per net with terminals
  const std::regex netbox_re("<rect class=\"netbox\"");
  const auto boxes = std::distance(
      std::sregex_iterator(svg.begin(), svg.end(), netbox_re),
      std::sregex_iterator());
  CHECK(boxes == static_cast<long>(d.nets.size()));
}

TEST_CASE("rendered macros never overlap for feasible inputs") {
  RngStream rng(307);
  for (int trial = 0; trial < 10; ++trial) {
    Design d = oracle::random_design(5, 2, 2, rng);
    const SequencePair sp = random_sequence_pair(5, rng);
    if (!is_feasible(sp, d.macros, d.outline)) continue;
    const Placement placement{pack(sp, d.macros).positions};
    const auto rects = macro_rects(render_svg(d, placement));
    for (std::size_t i = 0; i < rects.size(); ++i)
      for (std::size_t j = i + 1; j < rects.size(); ++j) {
        const bool disjoint = rects[i].x + rects[i].w <= rects[j].x + 1e-9 ||
                              rects[j].x + rects[j].w <= rects[i].x + 1e-9 ||
                              rects[i].y + rects[i].h <= rects[j].y + 1e-9 ||
                              rects[j].y + rects[j].h <= rects[i].y + 1e-9;
        CHECK(disjoint);
      }
  }
}

TEST_CASE("single macro renders one rectangle at the origin corner") {
  Design d;
  d.outline = {10, 10};
  d.macro_names = {"m0"};
  d.macros = {{4, 3}};
  const Placement placement{{{0, 0}}};
  const auto rects = macro_rects(render_svg(d, placement));
  REQUIRE(rects.size() == 1);
  CHECK(rects[0].x == 0);
  CHECK(rects[0].y == 7);  // 10 - 3
}
