#include <gtest/gtest.h>

#include <cstring>
#include <fstream>

#include "audiolib/media.hpp"
#include "support.hpp"

using namespace audiolib;
using audiolib::fixtures::as_bytes;
using audiolib::fixtures::pseudo_random_bytes;
using audiolib::fixtures::TempDir;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::string slice(const std::string& s, std::int64_t off, std::int64_t len) {
  return s.substr(static_cast<std::size_t>(off), static_cast<std::size_t>(len));
}

}  // namespace

TEST(MediaUpload, BeginValidatesSizeAndChecksum) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const std::string hex(64, 'a');
  auto s = m.begin_upload("vol", 1'048'576, hex);
  ASSERT_TRUE(s.ok());
  EXPECT_EQ(m.session(*s)->state, media::UploadState::Open);
  EXPECT_EQ(m.begin_upload("vol", 0, hex).code(), ErrorCode::SizeRejected);
  EXPECT_EQ(m.begin_upload("vol", 1'048'576, "xyz").code(), ErrorCode::BadChecksumFormat);

  media::MediaStore small(dir.path() / "small", 1000);
  EXPECT_EQ(small.begin_upload("vol", 1001, hex).code(), ErrorCode::SizeRejected);
}

TEST(MediaUpload, OutOfOrderChunksReassemble) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const auto file = pseudo_random_bytes(768, 1);
  const auto digest = crypto::sha256_hex(file);
  auto id = m.begin_upload("vol", 768, digest).value();
  double last = 0;
  for (std::int64_t off : {512, 0, 256}) {
    auto r = m.put_chunk(id, off, as_bytes(slice(file, off, 256)));
    ASSERT_TRUE(r.ok());
    EXPECT_GT(r->fraction, last);
    last = r->fraction;
  }
  EXPECT_DOUBLE_EQ(last, 1.0);
  auto c = m.finish_upload(id);
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->blob.digest, digest);
  // oracle: the sealed bytes hash to the source digest
  EXPECT_EQ(crypto::sha256_hex(read_file(m.path_of(c->blob.key))), digest);
  EXPECT_EQ(m.session(id)->state, media::UploadState::Complete);
}

TEST(MediaUpload, IdenticalResendIsIdempotent) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const auto file = pseudo_random_bytes(768, 2);
  auto id = m.begin_upload("vol", 768, crypto::sha256_hex(file)).value();
  auto first = m.put_chunk(id, 0, as_bytes(slice(file, 0, 256)));
  auto again = m.put_chunk(id, 0, as_bytes(slice(file, 0, 256)));
  ASSERT_TRUE(first.ok() && again.ok());
  EXPECT_EQ(first->received_bytes, again->received_bytes);
  EXPECT_DOUBLE_EQ(first->fraction, again->fraction);

  std::string altered = slice(file, 0, 256);
  altered[10] ^= 1;
  EXPECT_EQ(m.put_chunk(id, 0, as_bytes(altered)).code(), ErrorCode::ChunkConflict);
}

TEST(MediaUpload, ChunkBoundsAreChecked) {
  TempDir dir;
  media::MediaStore m(dir.path());
  auto id = m.begin_upload("vol", 768, std::string(64, 'b')).value();
  EXPECT_EQ(m.put_chunk(id, 700, as_bytes(std::string(100, 'x'))).code(), ErrorCode::RangeRejected);
  EXPECT_EQ(m.put_chunk(id, -1, as_bytes(std::string(10, 'x'))).code(), ErrorCode::RangeRejected);
  EXPECT_EQ(m.put_chunk("nope", 0, as_bytes(std::string(10, 'x'))).code(), ErrorCode::NoSuchSession);

  auto big = m.begin_upload("vol", media::kMaxChunkBytes + 1, std::string(64, 'b')).value();
  std::string chunk(static_cast<std::size_t>(media::kMaxChunkBytes + 1), 'x');
  EXPECT_EQ(m.put_chunk(big, 0, as_bytes(chunk)).code(), ErrorCode::SizeRejected);
}

TEST(MediaUpload, MissingRangeIsNamed) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const auto file = pseudo_random_bytes(768, 3);
  auto id = m.begin_upload("vol", 768, crypto::sha256_hex(file)).value();
  ASSERT_TRUE(m.put_chunk(id, 0, as_bytes(slice(file, 0, 256))).ok());
  ASSERT_TRUE(m.put_chunk(id, 512, as_bytes(slice(file, 512, 256))).ok());
  auto r = m.finish_upload(id);
  ASSERT_EQ(r.code(), ErrorCode::IncompleteUpload);
  EXPECT_NE(r.error().detail.find("[256,512)"), std::string::npos) << r.error().detail;
  EXPECT_EQ(m.session(id)->state, media::UploadState::Open);
}

TEST(MediaUpload, WrongDigestAborts) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const auto file = pseudo_random_bytes(768, 4);
  auto id = m.begin_upload("vol", 768, crypto::sha256_hex(file)).value();
  auto corrupted = file;
  corrupted[300] ^= 0x40;
  ASSERT_TRUE(m.put_chunk(id, 0, as_bytes(corrupted)).ok());
  EXPECT_EQ(m.finish_upload(id).code(), ErrorCode::ChecksumMismatch);
  auto info = m.session(id);
  EXPECT_EQ(info->state, media::UploadState::Aborted);
  EXPECT_FALSE(info->blob.has_value());
  EXPECT_FALSE(std::filesystem::exists(m.path_of("committed/" + id + ".mp3")));
  EXPECT_EQ(m.finish_upload(id).code(), ErrorCode::WrongState);
  EXPECT_EQ(m.put_chunk(id, 0, as_bytes(slice(file, 0, 1))).code(), ErrorCode::WrongState);
}

TEST(MediaUpload, SessionsSurviveReopen) {
  TempDir dir;
  const auto file = pseudo_random_bytes(5000, 5);
  std::string id;
  {
    media::MediaStore m(dir.path());
    id = m.begin_upload("vol", 5000, crypto::sha256_hex(file)).value();
    ASSERT_TRUE(m.put_chunk(id, 1000, as_bytes(slice(file, 1000, 2000))).ok());
  }
  media::MediaStore reopened(dir.path());
  auto info = reopened.session(id);
  ASSERT_TRUE(info.ok());
  EXPECT_EQ(info->owner, "vol");
  EXPECT_EQ(info->received_bytes, 2000);
  ASSERT_EQ(info->received.size(), 1u);
  EXPECT_EQ(info->received[0], (ByteRange{1000, 3000}));
  ASSERT_TRUE(reopened.put_chunk(id, 0, as_bytes(slice(file, 0, 1000))).ok());
  ASSERT_TRUE(reopened.put_chunk(id, 3000, as_bytes(slice(file, 3000, 2000))).ok());
  ASSERT_TRUE(reopened.finish_upload(id).ok());
}

TEST(MediaUpload, CommitProbesMp3AndAttaches) {
  TempDir dir;
  media::MediaStore m(dir.path());
  const auto file = harness::synth_mp3({128, 44100, 200, 512, 8});
  auto id = m.begin_upload("vol", static_cast<std::int64_t>(file.size()), crypto::sha256_hex(file)).value();
  ASSERT_TRUE(m.put_chunk(id, 0, as_bytes(file)).ok());
  auto c = m.finish_upload(id);
  ASSERT_TRUE(c.ok());
  ASSERT_TRUE(c->probe.has_value());
  EXPECT_NEAR(c->probe->duration_seconds, 200 * 1152.0 / 44100, 1e-9);
  EXPECT_NEAR(*m.session(id)->duration_seconds, 200 * 1152.0 / 44100, 1e-9);

  // finishing again returns the same blob
  auto again = m.finish_upload(id);
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(again->blob.key, c->blob.key);

  auto blob = m.attach_to_part(id, BookCode{3001}, PartCode{300110});
  ASSERT_TRUE(blob.ok());
  EXPECT_EQ(blob->key, "books/3001/parts/300110.mp3");
  EXPECT_EQ(read_file(m.path_of(blob->key)), file);
  EXPECT_EQ(*m.blob_size(blob->key), static_cast<std::int64_t>(file.size()));

  auto range = m.read_range(blob->key, {100, 200});
  ASSERT_TRUE(range.ok());
  ASSERT_EQ(range->size(), 100u);
  EXPECT_EQ(std::memcmp(range->data(), file.data() + 100, 100), 0);
  EXPECT_EQ(m.read_range(blob->key, {0, static_cast<std::int64_t>(file.size()) + 1}).code(), ErrorCode::RangeRejected);

  m.detach(blob->key);
  EXPECT_EQ(m.blob_size(blob->key).code(), ErrorCode::BlobMissing);
}

TEST(MediaUpload, NonAudioCommitHasNoProbe) {
  TempDir dir;
  media::MediaStore m(dir.path());
  auto file = pseudo_random_bytes(4096, 9);
  for (auto& c : file) {
    if (static_cast<unsigned char>(c) == 0xFF) c = 0;
  }
  auto id = m.begin_upload("vol", 4096, crypto::sha256_hex(file)).value();
  ASSERT_TRUE(m.put_chunk(id, 0, as_bytes(file)).ok());
  auto c = m.finish_upload(id);
  ASSERT_TRUE(c.ok());
  EXPECT_FALSE(c->probe.has_value());
}

TEST(MediaBlobs, KeysCannotEscapeTheRoot) {
  TempDir dir;
  media::MediaStore m(dir.path());
  EXPECT_FALSE(m.put_blob("../outside.mp3", as_bytes(std::string("x"))).ok());
  EXPECT_FALSE(m.put_blob("/abs.mp3", as_bytes(std::string("x"))).ok());
  EXPECT_TRUE(m.put_blob("trials/app-1.mp3", as_bytes(std::string("xyz"))).ok());
  EXPECT_EQ(*m.blob_size("trials/app-1.mp3"), 3);
}
