#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "mpbo/design_io.hpp"
#include "mpbo/errors.hpp"
#include "support/oracles.hpp"

using namespace mpbo;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  const fs::path dir = fs::temp_directory_path() / "mpbo_io_tests";
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("minimal native document") {
  const Design d = design_from_native(
      "mpdesign 1\noutline 10 10\nmacro m0 3 4\nend\n");
  CHECK(d.num_macros() == 1);
  CHECK(d.nets.empty());
  CHECK(d.outline.width == 10);
  CHECK(validate(d).empty());
}

TEST_CASE("comments and blank lines are skipped") {
  const Design d = design_from_native(
      "# a design\nmpdesign 1\n\noutline 10 10\n# macros\nmacro m0 3 4\nend\n");
  CHECK(d.num_macros() == 1);
}

TEST_CASE("undefined references are parse errors with location") {
  try {
    design_from_native(
        "mpdesign 1\noutline 10 10\nmacro m0 3 4\nnet n0 pin bogus 0 0\nend\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
    CHECK(std::string(e.what()).find("bogus") != std::string::npos);
  }
}

TEST_CASE("validation reports all violations") {
  Design d;
  d.outline = {4, 4};
  d.macro_names = {"a", "b"};
  d.macros = {{3, 3}, {3, 3}};  // area 18 > 16
  Net net;
  net.name = "n0";
  net.pins = {{0, 4, 1}};  // dx beyond width 3
  d.nets = {net};
  const auto violations = validate(d);
  REQUIRE(violations.size() == 2);
  bool area = false, pin = false;
  for (const auto& v : violations) {
    if (v.message.find("area") != std::string::npos) area = true;
    if (v.message.find("offset") != std::string::npos &&
        v.message.find("a") != std::string::npos)
      pin = true;
  }
  CHECK(area);
  CHECK(pin);
}

TEST_CASE("save and reload is the identity, and saving is deterministic") {
  RngStream rng(41);
  const fs::path path = temp_dir() / "roundtrip.mpd";
  for (int trial = 0; trial < 20; ++trial) {
    const Design d = oracle::random_design(
        1 + static_cast<int>(rng.below(6)), 1 + static_cast<int>(rng.below(5)),
        1 + static_cast<int>(rng.below(4)), rng);
    save_design(d, path.string());
    const std::string first = read_file(path);
    const Design back = load_design(path.string(), DesignFormat::kNative);
    CHECK(back == d);
    save_design(back, path.string());
    CHECK(read_file(path) == first);
  }
}

TEST_CASE("empty net lists and center pin mode round-trip") {
  Design d;
  d.outline = {10, 10};
  d.macro_names = {"m0"};
  d.macros = {{3, 4}};
  d.pin_mode = PinTerminalMode::kCenters;
  const fs::path path = temp_dir() / "empty_nets.mpd";
  save_design(d, path.string());
  CHECK(load_design(path.string(), DesignFormat::kNative) == d);
}

TEST_CASE("bookshelf triple with terminals and center pins") {
  const fs::path dir = temp_dir();
  write_file(dir / "toy.blocks",
             "UCSC blocks 1.0\n"
             "NumSoftRectangularBlocks : 0\n"
             "NumHardRectilinearBlocks : 2\n"
             "NumTerminals : 1\n"
             "bk1 hardrectilinear 4 (0, 0) (0, 4) (6, 4) (6, 0)\n"
             "bk2 hardrectilinear 4 (0, 0) (0, 2) (2, 2) (2, 0)\n"
             "pX terminal\n");
  write_file(dir / "toy.nets",
             "UCLA nets 1.0\n"
             "NumNets : 2\n"
             "NumPins : 4\n"
             "NetDegree : 2\n"
             "bk1 B\n"
             "pX B\n"
             "NetDegree : 2 named\n"
             "bk1 B : %25 %-25\n"
             "bk2 B\n");
  write_file(dir / "toy.pl",
             "UCLA pl 1.0\n"
             "bk1 0 0\n"
             "bk2 0 0\n"
             "pX 3 0\n");

  LoadOptions options;
  options.outline = Outline{30, 30};
  const Design d =
      load_design((dir / "toy.blocks").string(), DesignFormat::kBookshelf,
                  options);
  REQUIRE(d.num_macros() == 2);
  CHECK(d.macros[0].width == 6);
  CHECK(d.macros[0].height == 4);
  REQUIRE(d.pads.size() == 1);
  CHECK(d.pads[0].x == 3);
  REQUIRE(d.nets.size() == 2);
  CHECK(d.nets[0].pins[0].dx == 3);   // center of bk1
  CHECK(d.nets[0].pins[0].dy == 2);
  CHECK(d.nets[0].pad_ids == std::vector<int>{0});
  CHECK(d.nets[1].pins[0].dx == doctest::Approx(4.5));  // 3 + 25% of 6
  CHECK(d.nets[1].pins[0].dy == doctest::Approx(1.0));  // 2 - 25% of 4
  CHECK(d.pin_mode == PinTerminalMode::kOffsets);  // one explicit offset seen

  // whitespace outline: square side sqrt(1.15 * total area)
  LoadOptions ws;
  const Design d2 = load_design((dir / "toy").string(),
                                DesignFormat::kBookshelf, ws);
  const double side = std::sqrt(1.15 * (24 + 4));
  CHECK(d2.outline.width == doctest::Approx(side));
}

TEST_CASE("pads outside the outline: rejected or projected") {
  const fs::path dir = temp_dir();
  write_file(dir / "far.blocks",
             "UCSC blocks 1.0\n"
             "NumHardRectilinearBlocks : 1\n"
             "NumTerminals : 1\n"
             "bk1 hardrectilinear 4 (0, 0) (0, 4) (6, 4) (6, 0)\n"
             "pX terminal\n");
  write_file(dir / "far.nets",
             "UCLA nets 1.0\nNetDegree : 2\nbk1 B\npX B\n");
  write_file(dir / "far.pl", "UCLA pl 1.0\nbk1 0 0\npX 100 100\n");

  LoadOptions options;
  options.outline = Outline{30, 30};
  CHECK_THROWS_AS(load_design((dir / "far").string(),
                              DesignFormat::kBookshelf, options),
                  DataError);

  options.project_pads = true;
  const Design d = load_design((dir / "far").string(),
                               DesignFormat::kBookshelf, options);
  CHECK(d.pads[0].x == 30);
  CHECK(d.pads[0].y == 30);
}
