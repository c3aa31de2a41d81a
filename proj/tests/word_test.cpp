#include <random>

#include "chainscope/word.hpp"
#include "doctest.h"

using namespace chainscope;

namespace {

GroupWord random_word(std::mt19937& rng, int gens, int max_len) {
  std::vector<Factor> fs;
  int len = static_cast<int>(rng() % static_cast<unsigned>(max_len + 1));
  for (int i = 0; i < len; ++i)
    fs.push_back({static_cast<int>(rng() % static_cast<unsigned>(gens)),
                  rng() % 2 ? 1 : -1});
  return GroupWord(std::move(fs));
}

}  // namespace

TEST_CASE("free reduction on construction") {
  GroupWord w({{0, 1}, {0, -1}});
  CHECK(w.is_empty());
  GroupWord u({{0, 1}, {1, 1}, {1, -1}, {0, 1}});
  CHECK(u == GroupWord({{0, 1}, {0, 1}}));
  // nested cancellation
  GroupWord v({{0, 1}, {1, 1}, {2, 1}, {2, -1}, {1, -1}, {0, -1}});
  CHECK(v.is_empty());
}

TEST_CASE("product and inverse") {
  GroupWord a = GroupWord::generator(0);
  GroupWord b = GroupWord::generator(1);
  CHECK((a * b).factors() == std::vector<Factor>{{0, 1}, {1, 1}});
  CHECK((a * a.inverse()).is_empty());
  CHECK((a.inverse() * a).is_empty());
  CHECK(a.inverse().factors() == std::vector<Factor>{{0, -1}});
  CHECK((a * b).inverse() == b.inverse() * a.inverse());
}

TEST_CASE("powers") {
  GroupWord a = GroupWord::generator(0);
  CHECK(a.pow(0).is_empty());
  CHECK(a.pow(3).length() == 3);
  CHECK(a.pow(-2) == a.inverse() * a.inverse());
  GroupWord ab = GroupWord::generator(0) * GroupWord::generator(1);
  CHECK(ab.pow(2) == ab * ab);
  CHECK((ab.pow(3) * ab.pow(-3)).is_empty());
}

TEST_CASE("key is injective on reduced words") {
  GroupWord a = GroupWord::generator(0);
  GroupWord A = GroupWord::generator(0, -1);
  CHECK(a.key() != A.key());
  CHECK(a.key() == GroupWord::generator(0).key());
  CHECK(GroupWord{}.key() == GroupWord({{1, 1}, {1, -1}}).key());
}

TEST_CASE("group laws (randomized)") {
  std::mt19937 rng(99);
  for (int iter = 0; iter < 500; ++iter) {
    GroupWord u = random_word(rng, 3, 6);
    GroupWord v = random_word(rng, 3, 6);
    GroupWord w = random_word(rng, 3, 6);
    CHECK((u * v) * w == u * (v * w));
    CHECK((u * v).inverse() == v.inverse() * u.inverse());
    CHECK((u * u.inverse()).is_empty());
    CHECK(u.inverse().inverse() == u);
    CHECK(u * GroupWord{} == u);
    CHECK(GroupWord{} * u == u);
  }
}
