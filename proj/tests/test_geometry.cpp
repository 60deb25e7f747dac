#include <random>

#include "doctest.h"
#include "rsyn/box.hpp"
#include "rsyn/partition.hpp"
#include "rsyn/polyset.hpp"

using namespace rsyn;

namespace {

Box box1(const char* lo, const char* hi) {
  return Box({rat_parse(lo)}, {rat_parse(hi)});
}

Box box2(const char* lo0, const char* lo1, const char* hi0, const char* hi1) {
  return Box({rat_parse(lo0), rat_parse(lo1)}, {rat_parse(hi0), rat_parse(hi1)});
}

} // namespace

TEST_CASE("affine_image examples") {
  SUBCASE("identity map keeps the box") {
    auto p = affine_image(box1("0", "1"), {{Rat(1)}}, {Rat(0)});
    auto back = p.as_box();
    REQUIRE(back);
    CHECK(*back == box1("0", "1"));
  }
  SUBCASE("quarter-turn rotation preserves volume") {
    Mat rot{{Rat(0), Rat(-1)}, {Rat(1), Rat(0)}};
    auto p = affine_image(box2("0", "0", "1", "1"), rot, {Rat(0), Rat(0)});
    auto back = p.as_box(); // axis-aligned again after a quarter turn
    REQUIRE(back);
    CHECK(back->volume() == 1);
    CHECK(*back == box2("-1", "0", "0", "1"));
  }
  SUBCASE("interval shift") {
    auto p = affine_image(box1("0", "1/4"), {{Rat(1)}}, {rat_parse("3/10")});
    auto back = p.as_box();
    REQUIRE(back);
    CHECK(*back == box1("3/10", "11/20"));
  }
  SUBCASE("dimension mismatch rejected") {
    CHECK_THROWS_AS(affine_image(box1("0", "1"), Mat{{Rat(1), Rat(0)}}, {Rat(0)}),
                    std::invalid_argument);
  }
}

TEST_CASE("vertices of a box map to vertices of its affine image") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> num(-3, 3);
  for (int trial = 0; trial < 50; ++trial) {
    size_t n = 1 + trial % 3;
    Vec lo(n), hi(n), off(n);
    Mat a(n, Vec(n));
    for (size_t i = 0; i < n; ++i) {
      int l = num(rng);
      lo[i] = rat_frac(l, 2);
      hi[i] = rat_frac(l + 1 + (trial % 2), 2);
      off[i] = rat_frac(num(rng), 3);
      for (size_t j = 0; j < n; ++j) a[i][j] = rat_frac(num(rng), 2);
    }
    Box b(lo, hi);
    auto p = affine_image(b, a, off);
    auto image_vertices = p.vertices();
    for (const Vec& v : b.vertices()) {
      Vec mapped = vec_add(mat_vec(a, v), off);
      bool found = false;
      for (const Vec& w : image_vertices)
        if (vec_eq(mapped, w)) { found = true; break; }
      CHECK(found);
    }
  }
}

TEST_CASE("intersects examples") {
  SUBCASE("disjoint translates") {
    Mat id{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    auto p = affine_image(box2("0", "0", "1", "1"), id, {Rat(2), Rat(2)});
    CHECK_FALSE(intersects(p, box2("0", "0", "1", "1")));
  }
  SUBCASE("segment overlapping a box") {
    auto seg = affine_image(box1("0", "1/4"), {{Rat(1)}}, {rat_parse("3/10")});
    CHECK(intersects(seg, box1("1/4", "1/2")));
    CHECK_FALSE(intersects(seg, box1("0", "1/4")));
  }
  SUBCASE("boundary touching counts") {
    auto seg = affine_image(box1("0", "1/4"), {{Rat(1)}}, {Rat(0)});
    CHECK(intersects(seg, box1("1/4", "1/2")));
  }
}

TEST_CASE("contains examples") {
  SUBCASE("nested boxes") {
    Mat id{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
    auto p = affine_image(box2("0", "0", "1", "1"), id, {Rat(0), Rat(0)});
    CHECK(contains(p, box2("1/4", "1/4", "3/4", "3/4")));
  }
  SUBCASE("segment does not contain a wider interval") {
    auto seg = affine_image(box1("0", "1/4"), {{Rat(1)}}, {rat_parse("3/10")});
    CHECK_FALSE(contains(seg, box1("1/4", "1/2")));
  }
  SUBCASE("rotated square contains its inscribed box") {
    // exact rational rotation by the 3-4-5 angle
    Mat rot{{Rat(3, 5), Rat(-4, 5)}, {Rat(4, 5), Rat(3, 5)}};
    auto p = affine_image(box2("-1", "-1", "1", "1"), rot, {Rat(0), Rat(0)});
    CHECK(contains(p, box2("-7/10", "-7/10", "7/10", "7/10")));
    CHECK_FALSE(contains(p, box2("-3/4", "-3/4", "3/4", "3/4")));
  }
}

TEST_CASE("intersects and contains agree with grid sampling") {
  std::mt19937_64 rng(20240818);
  std::uniform_int_distribution<int> num(-2, 2);
  const int grid = 4;
  for (int trial = 0; trial < 120; ++trial) {
    size_t n = 1 + trial % 3;
    Vec lo(n), hi(n), off(n), blo(n), bhi(n);
    Mat a(n, Vec(n));
    for (size_t i = 0; i < n; ++i) {
      int l = num(rng);
      lo[i] = rat_frac(l, 2);
      hi[i] = rat_frac(l, 2) + rat_frac(1 + long(rng() % 2), 2);
      off[i] = rat_frac(num(rng), 2);
      int bl = num(rng);
      blo[i] = rat_frac(bl, 2);
      bhi[i] = rat_frac(bl, 2) + rat_frac(1 + long(rng() % 2), 2);
      for (size_t j = 0; j < n; ++j) a[i][j] = rat_frac(num(rng), 2);
    }
    Box cell(lo, hi), target(blo, bhi);
    auto p = affine_image(cell, a, off);
    bool inter = intersects(p, target);
    bool cont = contains(p, target);
    CAPTURE(trial);
    if (cont) CHECK(inter);

    // sample points of p: if one lies in target, intersects must hold
    std::vector<size_t> idx(n, 0);
    auto for_grid = [&](auto&& body) {
      std::fill(idx.begin(), idx.end(), 0);
      while (true) {
        body(idx);
        size_t ax = 0;
        while (ax < n && ++idx[ax] > grid) {
          idx[ax] = 0;
          ++ax;
        }
        if (ax == n) break;
      }
    };
    for_grid([&](const std::vector<size_t>& ix) {
      Vec alpha(n);
      for (size_t i = 0; i < n; ++i)
        alpha[i] = Rat(-1) + rat_frac(2 * long(ix[i]), grid);
      Vec pt = p.center;
      for (size_t j = 0; j < n; ++j)
        for (size_t i = 0; i < n; ++i) pt[i] += p.generators[i][j] * alpha[j];
      if (target.contains_point(pt)) CHECK(inter);
    });
    // sample points of target: a point outside p refutes contains; a point
    // inside p certifies intersects
    for_grid([&](const std::vector<size_t>& ix) {
      Vec pt(n);
      for (size_t i = 0; i < n; ++i)
        pt[i] = target.lo[i] + (target.hi[i] - target.lo[i]) * rat_frac(long(ix[i]), grid);
      bool inside = parallelotope_contains_point(p, pt);
      if (!inside) CHECK_FALSE(cont);
      if (inside) CHECK(inter);
    });
  }
}

TEST_CASE("partition construction validates the cover") {
  Box dom = box1("0", "1");
  CHECK_NOTHROW(Partition(dom, {box1("0", "1/2"), box1("1/2", "1")}));
  CHECK_THROWS_AS(Partition(dom, {box1("0", "1/2"), box1("1/4", "1")}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Partition(dom, {box1("0", "1/2"), box1("3/4", "1")}),
                  std::invalid_argument);
  CHECK_THROWS_AS(Partition(dom, {box1("0", "1/2")}), std::invalid_argument);
}

TEST_CASE("preserves examples") {
  Box dom = box1("0", "1");
  Partition quarters(dom, {box1("0", "1/4"), box1("1/4", "1/2"),
                           box1("1/2", "3/4"), box1("3/4", "1")});
  CHECK(preserves(quarters, {box1("0", "1/2")}));
  CHECK_FALSE(preserves(quarters, {box1("0", "3/10")}));
  CHECK(preserves(quarters, {dom}));
  SUBCASE("union assembled from two members") {
    CHECK(preserves(quarters, {box1("0", "1/4"), box1("1/4", "1/2")}));
  }
}

TEST_CASE("subsumes examples") {
  Box dom = box1("0", "1");
  Partition halves(dom, {box1("0", "1/2"), box1("1/2", "1")});
  Partition quarters(dom, {box1("0", "1/4"), box1("1/4", "1/2"),
                           box1("1/2", "3/4"), box1("3/4", "1")});
  Partition thirds(dom, {box1("0", "1/3"), box1("1/3", "1")});
  CHECK(subsumes(quarters, halves));
  CHECK_FALSE(subsumes(halves, quarters));
  CHECK_FALSE(subsumes(thirds, halves));
  CHECK(subsumes(halves, halves));
}

TEST_CASE("split_cell examples and lineage") {
  Box dom = box2("0", "0", "1", "1");
  Partition p(dom, {dom});
  Partition q = p.split_cell(0, 0);
  REQUIRE(q.size() == 2);
  CHECK(q.cell(q.ids()[0]) == box2("0", "0", "1/2", "1"));
  CHECK(q.cell(q.ids()[1]) == box2("1/2", "0", "1", "1"));
  CHECK_FALSE(q.live(0));
  CHECK(q.parent(q.ids()[0]) == CellId{0});
  CHECK(subsumes(q, p));
  CHECK(q.resolution() <= p.resolution());

  SUBCASE("splitting every cell on its widest axis halves cube resolution") {
    Partition uniform(dom, {box2("0", "0", "1/2", "1/2"), box2("1/2", "0", "1", "1/2"),
                            box2("0", "1/2", "1/2", "1"), box2("1/2", "1/2", "1", "1")});
    Rat before = uniform.resolution();
    Partition once = uniform;
    for (int round = 0; round < 2; ++round) {
      std::vector<std::pair<CellId, size_t>> splits;
      for (CellId id : once.ids()) {
        const Box& b = once.cell(id);
        size_t widest = 0;
        for (size_t ax = 1; ax < b.dim(); ++ax)
          if (b.side(ax) > b.side(widest)) widest = ax;
        splits.push_back({id, widest});
      }
      once = once.split_cells(splits);
    }
    CHECK(once.resolution() == before / 2);
  }
  SUBCASE("degenerate axis is rejected") {
    Box flat({Rat(0), Rat(0)}, {Rat(1), Rat(0)});
    Partition fp(flat, {flat});
    CHECK_THROWS_AS(fp.split_cell(0, 1), std::invalid_argument);
  }
}

TEST_CASE("random splits keep subsumption and the preserves monotonicity") {
  std::mt19937_64 rng(99);
  Box dom = box2("0", "0", "1", "1");
  Partition coarse(dom, {box2("0", "0", "1/2", "1"), box2("1/2", "0", "1", "1")});
  std::vector<Box> s{box2("0", "0", "1/2", "1")}; // union of coarse cells
  REQUIRE(preserves(coarse, s));
  Partition fine = coarse;
  for (int i = 0; i < 6; ++i) {
    auto ids = fine.ids();
    CellId pick = ids[rng() % ids.size()];
    size_t axis = rng() % 2;
    if (fine.cell(pick).side(axis) == 0) continue;
    fine = fine.split_cell(pick, axis);
    CHECK(subsumes(fine, coarse));
    CHECK(preserves(fine, s));
  }
}

TEST_CASE("box_subset_of_union handles joint coverage") {
  Mat id{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}};
  auto left = affine_image(box2("0", "0", "3/5", "1"), id, {Rat(0), Rat(0)});
  auto right = affine_image(box2("2/5", "0", "1", "1"), id, {Rat(0), Rat(0)});
  Box target = box2("0", "0", "1", "1");
  CHECK_FALSE(contains(left, target));
  CHECK_FALSE(contains(right, target));
  CHECK(box_subset_of_union(target, {left, right}));
  CHECK_FALSE(box_subset_of_union(box2("0", "0", "11/10", "1"), {left, right}));

  SUBCASE("gap between pieces is detected") {
    auto far_right = affine_image(box2("7/10", "0", "1", "1"), id, {Rat(0), Rat(0)});
    CHECK_FALSE(box_subset_of_union(target, {left, far_right}));
  }
  SUBCASE("degenerate target reduces dimension") {
    Box slice({rat_parse("1/2"), Rat(0)}, {rat_parse("1/2"), Rat(1)});
    CHECK(box_subset_of_union(slice, {left}));
    CHECK(box_subset_of_union(slice, {right}));
  }
  SUBCASE("point target") {
    Box pt({rat_parse("1/2"), rat_parse("1/2")}, {rat_parse("1/2"), rat_parse("1/2")});
    CHECK(box_subset_of_union(pt, {left}));
    Box out({Rat(2), Rat(2)}, {Rat(2), Rat(2)});
    CHECK_FALSE(box_subset_of_union(out, {left, right}));
  }
}

TEST_CASE("box_subset_of_union with sheared pieces") {
  // shear x' = x + y/2 applied to two half-boxes; together they cover the
  // image of the full box, and the test must see through the slanted seam
  Mat shear{{Rat(1), Rat(1, 2)}, {Rat(0), Rat(1)}};
  Box whole = box2("0", "0", "1", "1");
  auto whole_img = affine_image(whole, shear, {Rat(0), Rat(0)});
  auto bottom = affine_image(box2("0", "0", "1", "1/2"), shear, {Rat(0), Rat(0)});
  auto top = affine_image(box2("0", "1/2", "1", "1"), shear, {Rat(0), Rat(0)});
  Box inner = box2("1/2", "1/4", "1", "3/4");
  CHECK(contains(whole_img, inner));
  CHECK_FALSE(contains(bottom, inner));
  CHECK_FALSE(contains(top, inner));
  CHECK(box_subset_of_union(inner, {bottom, top}));
  CHECK_FALSE(box_subset_of_union(box2("0", "0", "1", "1"), {bottom, top}));
}

TEST_CASE("box_covered_by_union on box unions") {
  Box t = box2("0", "0", "1", "1");
  CHECK(box_covered_by_union(t, {box2("0", "0", "1", "1/2"), box2("0", "1/2", "1", "1")}));
  CHECK(box_covered_by_union(t, {box2("0", "0", "2/3", "1"), box2("1/3", "0", "1", "1")}));
  CHECK_FALSE(box_covered_by_union(t, {box2("0", "0", "2/3", "1"),
                                       box2("3/4", "0", "1", "1")}));
  CHECK_FALSE(box_covered_by_union(t, {}));
  CHECK(union_subset({box2("0", "0", "1/2", "1/2")}, {t}));
  CHECK_FALSE(union_subset({t}, {box2("0", "0", "1/2", "1")}));
}
