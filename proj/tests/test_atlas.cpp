#include "doctest.h"

#include "opspace/atlas.hpp"
#include "opspace/report.hpp"
#include "opspace/sampling.hpp"

#include <filesystem>
#include <fstream>

using namespace opspace;

TEST_CASE("example selectors") {
  CHECK(to_string(parse_example("full:3")) == "full:3");
  CHECK(to_string(parse_example("diagonal:2")) == "diag:2");
  CHECK(parse_example("corner:1").family == Family::corner);
  CHECK(parse_example("user:/tmp/x.json").path == "/tmp/x.json");
  for (const char* bad : {"full", "full:0", "full:-1", "full:2x", "corner:5", "full:9", "ring:2", "user:"})
    CHECK_THROWS_AS(parse_example(bad), Error);
}

TEST_CASE("example dimensions") {
  const SpacePtr f2 = make_example("full:2");
  CHECK(f2->dim() == 4);
  CHECK(f2->contains_identity());

  const SpacePtr c1 = make_example("corner:1");
  CHECK(c1->dim() == 2);
  CHECK(c1->ambient_dim() == 2);
  CHECK_FALSE(c1->contains_identity());

  const SpacePtr d3 = make_example("diag:3");
  CHECK(d3->dim() == 3);
  // Cone = entrywise nonnegative diagonals.
  CMat pos = CMat::Zero(3, 3), mixed = CMat::Zero(3, 3);
  pos.diagonal() << 1, 0, 2;
  mixed.diagonal() << 1, -0.5, 2;
  CHECK(cone_member(project(d3, pos, 1).element).member == Membership::yes);
  CHECK(cone_member(project(d3, mixed, 1).element).member == Membership::no);

  CHECK(make_example("corner:3")->dim() == 18);
  for (const char* name : {"full:3", "diag:4", "corner:2"}) {
    const SpacePtr s = make_example(name);
    CHECK(s->gram_defect() <= 1e-10);
    CHECK(s->adjoint_closure_defect() <= 1e-10);
    CHECK(s->name() == name);
  }
}

TEST_CASE("corner spaces have a trivial cone at every sampled level") {
  Sampler rng(71);
  for (Index m = 1; m <= 3; ++m) {
    const SpacePtr c = corner_space(m);
    int yes = 0;
    for (int t = 0; t < 500 / 3; ++t) {
      const LevelElement x = t % 2 ? rng.hermitian_element(c, 1 + t % 2) : rng.element(c, 1 + t % 2);
      if (cone_member(x).member != Membership::no) ++yes;
    }
    CHECK(yes == 0);
  }
}

TEST_CASE("user spaces load from files") {
  const auto path = std::filesystem::temp_directory_path() / "opspace_user_space_test.json";
  {
    std::ofstream f(path);
    f << R"({"name": "toeplitz", "ambient_dim": 2,
             "generators": [{"re": [[1, 0], [0, 1]]}, {"re": [[0, 1], [0, 0]], "im": [[0, 0], [0, 0]]}]})";
  }
  const SpacePtr s = make_example("user:" + path.string());
  CHECK(s->dim() == 3);
  CHECK(s->contains_identity());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(make_example("user:/nonexistent/space.json"), Error);
  const auto bad = std::filesystem::temp_directory_path() / "opspace_user_space_bad.json";
  {
    std::ofstream f(bad);
    f << R"({"ambient_dim": 3, "generators": [{"re": [[1, 0], [0, 1]]}]})";
  }
  CHECK_THROWS_AS(make_example("user:" + bad.string()), Error);
  std::filesystem::remove(bad);
}

TEST_CASE("l1 probe") {
  const L1ProbeReport p = l1_two_probe(6, 5);
  CHECK(p.unit_norm == doctest::Approx(2.0).epsilon(1e-7));
  CHECK(p.estimate >= 1.0 - 1e-6);
  CHECK(p.estimate <= 2.0 + 1e-5);
  CHECK(p.undecided == 0);
  const L1ProbeReport again = l1_two_probe(6, 5);
  CHECK(again.estimate == p.estimate);
  CHECK(again.max_gap == p.max_gap);
}
