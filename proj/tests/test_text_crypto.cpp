#include <gtest/gtest.h>

#include <random>
#include <set>

#include "audiolib/crypto.hpp"
#include "audiolib/intervals.hpp"
#include "audiolib/notifications.hpp"
#include "audiolib/result.hpp"
#include "audiolib/text.hpp"

using namespace audiolib;

TEST(Text, CaseFoldingHandlesTurkishLetters) {
  EXPECT_EQ(text::fold_case("KELOĞLAN"), text::fold_case("keloğlan"));
  EXPECT_EQ(text::fold_case("SIMYACI"), text::fold_case("Sımyacı"));
  EXPECT_EQ(text::fold_case("İstanbul"), text::fold_case("istanbul"));
  EXPECT_TRUE(text::contains_folded("Keloğlan Masalları", "MASALLARI"));
  EXPECT_FALSE(text::contains_folded("Diana", "dianna"));
}

TEST(Text, WhitespaceAndCounting) {
  EXPECT_EQ(text::collapse_whitespace("  a \t b\n\nc  "), "a b c");
  EXPECT_EQ(text::trim("  x y "), "x y");
  EXPECT_EQ(text::count_code_points("ğüşiöç"), 6u);
  EXPECT_EQ(text::count_code_points("abc"), 3u);
}

TEST(Text, AbsoluteUrls) {
  EXPECT_TRUE(text::is_absolute_url("https://example.org/news"));
  EXPECT_TRUE(text::is_absolute_url("http://localhost:8080"));
  EXPECT_FALSE(text::is_absolute_url("not a url"));
  EXPECT_FALSE(text::is_absolute_url("ftp://example.org"));
  EXPECT_FALSE(text::is_absolute_url("https://"));
  EXPECT_FALSE(text::is_absolute_url("https://exa mple.org"));
}

TEST(Crypto, Sha256KnownVectors) {
  EXPECT_EQ(crypto::sha256_hex(std::string_view("")),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(crypto::sha256_hex(std::string_view("abc")),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  crypto::Sha256 h;
  h.update(std::string_view("a"));
  h.update(std::string_view("bc"));
  auto d = h.finish();
  EXPECT_EQ(crypto::to_hex(d), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Crypto, HexFormatCheck) {
  EXPECT_TRUE(crypto::is_sha256_hex(std::string(64, 'a')));
  EXPECT_TRUE(crypto::is_sha256_hex(std::string(64, 'F')));
  EXPECT_FALSE(crypto::is_sha256_hex("xyz"));
  EXPECT_FALSE(crypto::is_sha256_hex(std::string(63, 'a')));
  EXPECT_FALSE(crypto::is_sha256_hex(std::string(64, 'g')));
}

TEST(Crypto, PasswordsAndTokens) {
  auto digest = crypto::hash_password("correct horse", 1000);
  EXPECT_TRUE(crypto::verify_password("correct horse", digest));
  EXPECT_FALSE(crypto::verify_password("correct hors", digest));
  EXPECT_NE(crypto::hash_password("correct horse", 1000), digest);  // salted
  EXPECT_FALSE(crypto::verify_password("x", "garbage"));

  std::set<std::string> tokens;
  for (int i = 0; i < 200; ++i) tokens.insert(crypto::random_token());
  EXPECT_EQ(tokens.size(), 200u);
  EXPECT_EQ(crypto::random_token().size(), 22u);
  auto pw = crypto::random_password(12);
  EXPECT_EQ(pw.size(), 12u);
  for (char c : pw) EXPECT_TRUE(std::isalnum(static_cast<unsigned char>(c)));
}

TEST(Intervals, MergesAndReportsGaps) {
  IntervalSet s;
  s.insert({512, 768});
  s.insert({0, 256});
  EXPECT_EQ(s.covered(), 512);
  auto gaps = s.gaps(768);
  ASSERT_EQ(gaps.size(), 1u);
  EXPECT_EQ(gaps[0], (ByteRange{256, 512}));
  s.insert({256, 512});
  EXPECT_EQ(s.ranges().size(), 1u);
  EXPECT_TRUE(s.covers({0, 768}));
  EXPECT_TRUE(s.gaps(768).empty());
}

TEST(Intervals, RandomInsertsMatchBitmapOracle) {
  std::mt19937 rng(5);
  for (int round = 0; round < 200; ++round) {
    const int n = 1 + static_cast<int>(rng() % 300);
    std::vector<bool> bitmap(static_cast<std::size_t>(n), false);
    IntervalSet s;
    for (int k = 0; k < 12; ++k) {
      const int a = static_cast<int>(rng() % static_cast<unsigned>(n));
      const int b = a + 1 + static_cast<int>(rng() % static_cast<unsigned>(n - a));
      s.insert({a, b});
      for (int i = a; i < b; ++i) bitmap[static_cast<std::size_t>(i)] = true;
    }
    std::int64_t covered = 0;
    for (bool b : bitmap) covered += b;
    ASSERT_EQ(s.covered(), covered);
    // ranges are disjoint, non-adjacent and match the bitmap runs
    std::vector<ByteRange> runs;
    for (int i = 0; i < n; ++i) {
      if (!bitmap[static_cast<std::size_t>(i)]) continue;
      if (!runs.empty() && runs.back().end == i) {
        ++runs.back().end;
      } else {
        runs.push_back({i, i + 1});
      }
    }
    ASSERT_EQ(s.ranges(), runs);
    std::int64_t gap_total = 0;
    for (auto g : s.gaps(n)) gap_total += g.length();
    ASSERT_EQ(gap_total, n - covered);
  }
}

TEST(ErrorCodes, NamesRoundTrip) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::Internal); ++i) {
    auto code = static_cast<ErrorCode>(i);
    ErrorCode back{};
    ASSERT_TRUE(parse_error_code(to_string(code), back)) << i;
    EXPECT_EQ(back, code);
  }
  ErrorCode out{};
  EXPECT_FALSE(parse_error_code("NoSuchThing", out));
}

TEST(Notifications, LineEncodingRoundTrips) {
  NotificationEvent e{NotificationKind::CredentialsIssued, "a@example.org", {{"username", "ayşe"}, {"password", "x\"y"}}, 42};
  auto line = encode_line(e);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  auto back = decode_line(line);
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, e);
  EXPECT_FALSE(decode_line("not json").has_value());
}
