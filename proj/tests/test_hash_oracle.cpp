#include <doctest.h>

#include <array>
#include <cmath>
#include <set>
#include <string>
#include <unordered_set>

#include "parchain/hash_oracle.hpp"

using namespace parchain;

namespace {

Block fixture_block(unsigned lambda) {
  Block b;
  std::string tx = "parchain fixture block";
  b.transactions.assign(tx.begin(), tx.end());
  b.root = HashValue(lambda);
  b.trailing = HashValue(lambda);
  for (auto& byte : b.root.mutable_bytes()) byte = 0x11;
  for (auto& byte : b.trailing.mutable_bytes()) byte = 0x22;
  for (std::size_t i = 0; i < b.nonce.size(); ++i) b.nonce[i] = static_cast<std::uint8_t>(i + 1);
  return b;
}

HashValue random_hash(Rng& rng, unsigned lambda = 256) {
  HashValue h(lambda);
  for (auto& byte : h.mutable_bytes()) byte = static_cast<std::uint8_t>(rng());
  return h;
}

ProtocolParams oracle_params(std::uint32_t k, double p) {
  ProtocolParams params;
  params.k = k;
  params.p = p;
  params.mode = MiningMode::oracle;
  return params;
}

}  // namespace

// Golden values come from tools/oracles/golden_vectors.py (hashlib).
TEST_CASE("hash_block matches the frozen digests") {
  CHECK(hash_block(fixture_block(256), 256).hex() ==
        "2633bf44b8015e69f7d03db4e86ed1133642c07bd8c2e74d0208224ec9489699");
  CHECK(hash_block(fixture_block(128), 128).hex() == "cf5ef442b2a29c41bd6d3bc5587c83f7");
  CHECK(hash_block(make_genesis(0, 256), 256).hex() ==
        "3a421f165adc5741728604091f4889a09ea1428ce2adff52b02f9b35c97d7362");
  CHECK(hash_block(make_genesis(3, 256), 256).hex() ==
        "84fc637740ce83721cabb4f576edbbfecb127940113ba6fa8bd44ee8a782fbfb");
}

TEST_CASE("hash_block is deterministic and sensitive to the nonce") {
  Block a = fixture_block(256);
  Block b = fixture_block(256);
  CHECK(hash_block(a, 256) == hash_block(b, 256));
  b.nonce[7] ^= 1;
  CHECK(hash_block(a, 256) != hash_block(b, 256));
}

TEST_CASE("hash_block has no collisions over generated blocks") {
  Rng rng(7);
  Block b = fixture_block(256);
  std::unordered_set<HashValue, HashValueHasher> seen;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    std::uint64_t x = rng();
    for (int j = 0; j < 8; ++j) b.nonce[j] = static_cast<std::uint8_t>(x >> (8 * j));
    b.transactions.resize(1 + i % 5);
    seen.insert(hash_block(b, 256));
  }
  // Distinct (nonce, length) pairs are overwhelmingly distinct inputs.
  CHECK(seen.size() == static_cast<std::size_t>(n));
}

TEST_CASE("is_pow_valid checks the leading zeros") {
  ProtocolParams params = oracle_params(1, 1.0 / 256);
  REQUIRE(params.difficulty() == 8);
  CHECK(is_pow_valid(HashValue(256), params));
  HashValue h(256);
  h.set_bit(0, true);
  CHECK_FALSE(is_pow_valid(h, params));
  h = HashValue(256);
  h.set_bit(8, true);
  CHECK(is_pow_valid(h, params));
  h.set_bit(7, true);
  CHECK_FALSE(is_pow_valid(h, params));

  Rng rng(11);
  const int n = 1000000;
  int ok = 0;
  for (int i = 0; i < n; ++i) ok += is_pow_valid(random_hash(rng), params);
  double expected = n / 256.0;
  CHECK(std::abs(ok - expected) < 4 * std::sqrt(expected));
}

TEST_CASE("difficulty follows k*p") {
  CHECK(oracle_params(16, 1.0 / 160).difficulty() == 3);
  CHECK(oracle_params(4, 1.0 / 1024).difficulty() == 8);
  CHECK(oracle_params(1, 1.0).difficulty() == 1);  // clamped: at least one zero bit
  CHECK(oracle_params(1, 1.0).success_probability() == doctest::Approx(1.0));
}

TEST_CASE("chain_index uses the last 48 bits mod k") {
  HashValue h(256);
  h.set_trailing_bits(48, 3);
  CHECK(chain_index(h, 250) == 3);
  CHECK(chain_index(h, 1) == 0);
  h.set_trailing_bits(48, 0xFFFFFFFFFFFFULL);
  CHECK(chain_index(h, 250) == 0xFFFFFFFFFFFFULL % 250);
  // Bits above the selector do not matter.
  HashValue g = h;
  g.mutable_bytes()[0] = 0xAB;
  CHECK(chain_index(g, 250) == chain_index(h, 250));
}

TEST_CASE("chain_index equals the low bits for power-of-two k") {
  Rng rng(13);
  for (std::uint32_t k : {1U, 2U, 4U, 8U}) {
    for (int i = 0; i < 10000; ++i) {
      HashValue h = random_hash(rng);
      std::uint32_t low = static_cast<std::uint32_t>(h.trailing_bits(16)) & (k - 1);
      REQUIRE(chain_index(h, k) == low);
    }
  }
}

TEST_CASE("chain_index is uniform over random hashes") {
  Rng rng(17);
  const std::uint32_t k = 250;
  const int n = 1000000;
  std::vector<int> counts(k, 0);
  for (int i = 0; i < n; ++i) ++counts[chain_index(random_hash(rng), k)];
  double mean = static_cast<double>(n) / k;
  double sigma = std::sqrt(mean * (1.0 - 1.0 / k));
  int outside = 0;
  double chi2 = 0;
  for (int c : counts) {
    outside += std::abs(c - mean) > 3 * sigma;
    chi2 += (c - mean) * (c - mean) / mean;
  }
  // About 0.27% of chains land outside 3 sigma by chance; allow a few.
  CHECK(outside <= 5);
  // chi-square with 249 dof: the 0.999 quantile is about 330.
  CHECK(chi2 < 330);
}

TEST_CASE("oracle mining success rate and chain split") {
  ProtocolParams params = oracle_params(16, 1.0 / 160);
  Rng rng(19);
  const int calls = 1000000;
  std::vector<int> per_chain(16, 0);
  int successes = 0;
  for (int i = 0; i < calls; ++i) {
    auto h = oracle_mining_attempt(rng, params);
    if (!h) continue;
    ++successes;
    REQUIRE(is_pow_valid(*h, params));
    ++per_chain[chain_index(*h, 16)];
  }
  double expected = calls * 0.1;
  CHECK(std::abs(successes - expected) < 4 * std::sqrt(expected * 0.9));
  double chi2 = 0;
  double mean = successes / 16.0;
  for (int c : per_chain) {
    CHECK(std::abs(c - mean) < 4 * std::sqrt(mean));
    chi2 += (c - mean) * (c - mean) / mean;
  }
  // 15 dof: the 0.999 quantile is 37.7.
  CHECK(chi2 < 37.7);
}

TEST_CASE("oracle mining with k*p = 1 always succeeds") {
  ProtocolParams params = oracle_params(2, 0.5);
  Rng rng(23);
  for (int i = 0; i < 1000; ++i) REQUIRE(oracle_mining_attempt(rng, params).has_value());
}

TEST_CASE("real hash mining needs about 2^d calls per success") {
  ProtocolParams params;
  params.k = 1;
  params.p = 1.0 / 16;
  params.mode = MiningMode::real_hash;
  params.validate();
  REQUIRE(params.difficulty() == 4);
  Block b = fixture_block(256);
  int successes = 0;
  const int calls = 160000;
  for (int i = 0; i < calls; ++i) {
    for (int j = 0; j < 8; ++j) b.nonce[j] = static_cast<std::uint8_t>(i >> (8 * j));
    successes += real_mining_attempt(b, params).has_value();
  }
  double expected = calls / 16.0;
  CHECK(std::abs(successes - expected) < 4 * std::sqrt(expected));
}

TEST_CASE("mining mode mismatches are configuration errors") {
  Rng rng(1);
  ProtocolParams real;
  real.mode = MiningMode::real_hash;
  CHECK_THROWS_AS(oracle_mining_attempt(rng, real), ConfigError);
  CHECK_THROWS_AS(real_mining_attempt(fixture_block(256), oracle_params(1, 0.5)), ConfigError);

  ProtocolParams bad;
  bad.mode = MiningMode::real_hash;
  bad.k = 3;
  bad.p = 1.0 / 100;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("params validation") {
  ProtocolParams ok = oracle_params(8, 1.0 / 1000);
  CHECK_NOTHROW(ok.validate());
  ProtocolParams too_big = oracle_params(8, 0.5);
  CHECK_THROWS_AS(too_big.validate(), ConfigError);
  ProtocolParams zero_T = ok;
  zero_T.T = 0;
  CHECK_THROWS_AS(zero_T.validate(), ConfigError);
  ProtocolParams narrow = ok;
  narrow.lambda = 40;
  CHECK_THROWS_AS(narrow.validate(), ConfigError);
  CHECK(ProtocolParams::p_for(5, 10, 20) == doctest::Approx(1.0 / 1000));
}

TEST_CASE("synthesized hashes land on their chain uniformly") {
  ProtocolParams params = oracle_params(250, 1.0 / 5000);
  Rng rng(29);
  std::vector<int> counts(250, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    HashValue h = synthesize_valid_hash(rng, params);
    REQUIRE(h.leading_zero_bits() >= params.difficulty());
    ++counts[chain_index(h, 250)];
  }
  double mean = n / 250.0;
  double chi2 = 0;
  for (int c : counts) chi2 += (c - mean) * (c - mean) / mean;
  CHECK(chi2 < 330);
}

TEST_CASE("oracle keeps the first output for repeated content") {
  ProtocolParams params = oracle_params(4, 1.0 / 64);
  Oracle oracle(params);
  HashValue digest = hash_block(fixture_block(256), 256);
  HashValue first(256);
  first.set_trailing_bits(8, 1);
  HashValue second(256);
  second.set_trailing_bits(8, 2);
  CHECK(oracle.program(digest, first) == first);
  CHECK(oracle.program(digest, second) == first);
  CHECK(oracle.verify(digest, first));
  CHECK_FALSE(oracle.verify(digest, second));
  REQUIRE(oracle.lookup(digest).has_value());
  CHECK(*oracle.lookup(digest) == first);
  CHECK_FALSE(oracle.lookup(second).has_value());
}

TEST_CASE("HashValue hex round trip and ordering") {
  auto parsed = HashValue::from_hex("00ff10");
  REQUIRE(parsed.has_value());
  const HashValue& h = *parsed;
  CHECK(h.bit_width() == 24);
  CHECK(h.hex() == "00ff10");
  CHECK(h.leading_zero_bits() == 8);
  CHECK(HashValue::from_hex("0001") < HashValue::from_hex("0100"));
  CHECK_FALSE(HashValue::from_hex("abc").has_value());
}
