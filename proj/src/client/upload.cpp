#include "audiolib/client/upload.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "audiolib/crypto.hpp"
#include "audiolib/intervals.hpp"

namespace audiolib::client {

using nlohmann::json;

namespace {

std::mutex state_mutex;

std::string state_key(const ApiClient& api, const UploadPlan& plan, const std::string& digest, std::int64_t size) {
  return api.base_url() + "|" + std::to_string(plan.book.value) + "|" + digest + "|" + std::to_string(size);
}

json load_state(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) return json::object();
  auto j = json::parse(in, nullptr, false);
  return j.is_object() ? j : json::object();
}

void store_state(const std::filesystem::path& file, const json& j) {
  std::error_code ec;
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path(), ec);
  const auto tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, file, ec);
}

std::optional<std::string> remembered_session(const UploadPlan& plan, const std::string& key) {
  if (plan.state_file.empty()) return std::nullopt;
  std::lock_guard lock(state_mutex);
  auto j = load_state(plan.state_file);
  if (auto it = j.find(key); it != j.end() && it->is_string()) return it->get<std::string>();
  return std::nullopt;
}

void remember_session(const UploadPlan& plan, const std::string& key, const std::optional<std::string>& session) {
  if (plan.state_file.empty()) return;
  std::lock_guard lock(state_mutex);
  auto j = load_state(plan.state_file);
  if (session) {
    j[key] = *session;
  } else {
    j.erase(key);
  }
  store_state(plan.state_file, j);
}

struct ChunkJob {
  std::int64_t offset;
  std::int64_t length;
};

}  // namespace

Result<std::pair<std::string, std::int64_t>> digest_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return Error{ErrorCode::NotFound, "cannot read " + file.string()};
  crypto::Sha256 sha;
  std::vector<char> buf(1 << 20);
  std::int64_t size = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    const auto n = in.gcount();
    if (n <= 0) break;
    sha.update(std::as_bytes(std::span(buf.data(), static_cast<std::size_t>(n))));
    size += n;
  }
  const auto d = sha.finish();
  return std::pair{crypto::to_hex(d), size};
}

Result<UploadOutcome> upload_part(ApiClient& api, const UploadPlan& plan, const UploadHooks& hooks) {
  if (plan.chunk_size == 0) return Error{ErrorCode::BadRequest, "chunk size must be positive"};
  auto digest = digest_file(plan.file);
  if (!digest) return digest.error();
  const auto [checksum, size] = *digest;
  const std::string key = state_key(api, plan, checksum, size);

  UploadOutcome outcome;
  outcome.digest = checksum;

  // Find the session again if an earlier run left one behind.
  IntervalSet received;
  bool sealed = false;
  if (auto previous = remembered_session(plan, key)) {
    auto status = api.call("GET", "/api/uploads/" + *previous);
    if (status && (*status)["state"] != "Aborted") {
      outcome.session_id = *previous;
      outcome.resumed = true;
      sealed = (*status)["state"] == "Complete";
      for (const auto& r : (*status)["received"]) {
        received.insert(ByteRange{r[0].get<std::int64_t>(), r[1].get<std::int64_t>()});
      }
    } else if (!status && status.code() == ErrorCode::ConnectFailed) {
      return status.error();
    }
  }
  if (outcome.session_id.empty()) {
    auto begun = api.call("POST", "/api/uploads", json{{"size", size}, {"checksum", checksum}});
    if (!begun) return begun.error();
    outcome.session_id = (*begun)["session_id"].get<std::string>();
    remember_session(plan, key, outcome.session_id);
  }
  if (hooks.on_session) hooks.on_session(outcome.session_id);

  if (!sealed) {
    std::vector<ChunkJob> jobs;
    for (const auto& gap : received.gaps(size)) {
      for (std::int64_t off = gap.begin; off < gap.end; off += static_cast<std::int64_t>(plan.chunk_size)) {
        jobs.push_back({off, std::min<std::int64_t>(static_cast<std::int64_t>(plan.chunk_size), gap.end - off)});
      }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> stop{false};
    std::atomic<std::int64_t> sent{0};
    std::mutex mutex;
    std::optional<Error> failure;
    auto fail = [&](Error e) {
      std::lock_guard lock(mutex);
      if (!failure) failure = std::move(e);
      stop = true;
    };

    auto worker = [&] {
      ApiClient conn(api.base_url(), api.token());
      conn.set_observer(api.observer());
      std::ifstream in(plan.file, std::ios::binary);
      std::vector<char> buf;
      while (!stop) {
        const std::size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        const ChunkJob job = jobs[i];
        if (hooks.before_chunk) {
          std::lock_guard lock(mutex);
          if (!stop && !hooks.before_chunk(job.offset, job.length)) {
            failure = Error{ErrorCode::ConnectFailed, "interrupted"};
            stop = true;
          }
        }
        if (stop) return;
        // read at send time: the file may have changed since it was digested
        buf.resize(static_cast<std::size_t>(job.length));
        in.clear();
        in.seekg(job.offset);
        in.read(buf.data(), job.length);
        buf.resize(static_cast<std::size_t>(std::max<std::streamsize>(0, in.gcount())));
        if (buf.empty()) {
          fail(Error{ErrorCode::ChecksumMismatch, "file shrank while uploading"});
          return;
        }
        auto reply = conn.send("PUT", "/api/uploads/" + outcome.session_id + "/chunks?offset=" + std::to_string(job.offset),
                               std::string(buf.data(), buf.size()), "application/octet-stream");
        if (!reply) {
          fail(reply.error());
          return;
        }
        if (reply->status != 200) {
          fail(error_from_reply(*reply));
          return;
        }
        sent += static_cast<std::int64_t>(buf.size());
      }
    };

    const int threads = std::max(1, std::min<int>(plan.in_flight, static_cast<int>(jobs.size())));
    std::vector<std::thread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    outcome.bytes_sent = sent;
    if (failure) return *failure;
  }

  auto committed = api.call("POST", "/api/uploads/" + outcome.session_id + "/commit", json{{"checksum", checksum}});
  if (!committed) {
    if (committed.code() == ErrorCode::ChecksumMismatch) remember_session(plan, key, std::nullopt);
    return committed.error();
  }
  if (const auto& d = (*committed)["duration_seconds"]; d.is_number()) outcome.duration_seconds = d.get<double>();

  auto part = api.call("POST", "/api/books/" + std::to_string(plan.book.value) + "/parts",
                       json{{"name", plan.part_name}, {"upload_session", outcome.session_id}});
  if (!part) return part.error();
  outcome.part = PartCode{(*part)["part_code"].get<std::int64_t>()};
  // The session stays remembered: running the same upload again finds it
  // sealed and gets the already registered part back instead of a copy.
  return outcome;
}

}  // namespace audiolib::client
