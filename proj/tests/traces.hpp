#pragma once

// Random workflow traces at engine level: requests, claims, claim and part
// reviews, submissions, completions and playback, in random order.

#include <functional>
#include <random>
#include <vector>

#include "support.hpp"

namespace audiolib::fixtures {

struct TraceActors {
  std::vector<AccountId> impaired;
  std::vector<AccountId> volunteers;
};

inline TraceActors add_trace_actors(World& w, int impaired = 2, int volunteers = 3) {
  TraceActors a;
  for (int i = 0; i < impaired; ++i) a.impaired.push_back(w.add_account(Role::Impaired, "imp" + std::to_string(i)));
  for (int i = 0; i < volunteers; ++i) a.volunteers.push_back(w.add_account(Role::Volunteer, "vol" + std::to_string(i)));
  return a;
}

struct TraceStep {
  std::string op;
  bool ok = false;
  ErrorCode code = ErrorCode::Internal;
  std::optional<StreamResult> stream;  // set for successful playback
  AccountId caller;
  PartCode part;
};

template <class T>
const T& pick(std::mt19937& rng, const std::vector<T>& v) {
  return v[rng() % v.size()];
}

/// Runs `steps` random operations; `after` sees each one.
inline void run_trace(World& w, const TraceActors& actors, std::mt19937& rng, int steps,
                      const std::function<void(const TraceStep&)>& after) {
  static const char* kTitles[] = {"Diana", "Keloğlan Masalları", "Yüzde Yüz Düşünce Gücü", "Aşk-ı Memnu",
                                  "Simyacı", "Çalıkuşu", "Kürk Mantolu Madonna", "Tutunamayanlar"};
  auto books = [&] {
    std::vector<BookCode> out;
    for (const auto& [k, v] : w.store->snapshot()->table<Book>()) out.push_back(v.value.code);
    return out;
  };
  auto parts = [&](std::optional<PartStatus> status) {
    std::vector<PartCode> out;
    for (const auto& [k, v] : w.store->snapshot()->table<Part>()) {
      if (!status || v.value.status == *status) out.push_back(v.value.code);
    }
    return out;
  };
  auto claims = [&] {
    std::vector<std::string> out;
    for (const auto& [k, v] : w.store->snapshot()->table<RecordingClaim>()) {
      if (v.value.status == ClaimStatus::Pending) out.push_back(v.value.id);
    }
    return out;
  };
  auto record = [](TraceStep& s, const auto& r) {
    s.ok = r.ok();
    if (!r.ok()) s.code = r.code();
  };

  for (int i = 0; i < steps; ++i) {
    TraceStep s;
    w.clock.advance(1 + static_cast<Timestamp>(rng() % 5000));
    const unsigned roll = rng() % 100;
    if (roll < 10) {
      s.op = "request";
      s.caller = pick(rng, actors.impaired);
      record(s, w.engine.request_book(s.caller, kTitles[rng() % 8], "Yazar " + std::to_string(rng() % 2)));
    } else if (roll < 22) {
      auto b = books();
      if (b.empty()) continue;
      s.op = "claim";
      s.caller = pick(rng, actors.volunteers);
      record(s, w.engine.claim_recording(s.caller, pick(rng, b)));
    } else if (roll < 32) {
      auto c = claims();
      if (c.empty()) continue;
      s.op = "review_claim";
      s.caller = w.admin;
      record(s, w.engine.review_claim(w.admin, pick(rng, c), rng() % 3 ? Decision::Approve : Decision::Reject));
    } else if (roll < 50) {
      auto b = books();
      if (b.empty()) continue;
      s.op = "submit";
      // mostly the assigned reader, sometimes anyone
      BookCode book = pick(rng, b);
      const Book* rec = w.store->snapshot()->book(book);
      s.caller = rec->assigned_reader && rng() % 4 ? *rec->assigned_reader : pick(rng, actors.volunteers);
      harness::Mp3Spec spec;
      spec.frames = 5 + static_cast<int>(rng() % 30);
      spec.seed = rng();
      auto session = w.upload(s.caller, harness::synth_mp3(spec));
      auto r = w.engine.submit_part(s.caller, book, "Bölüm " + std::to_string(i), session);
      record(s, r);
      if (r.ok()) s.part = *r;
    } else if (roll < 64) {
      auto p = parts(PartStatus::PendingApproval);
      if (p.empty()) continue;
      s.op = "review_part";
      s.caller = w.admin;
      s.part = pick(rng, p);
      record(s, w.engine.review_part(w.admin, s.part, rng() % 3 ? Decision::Approve : Decision::Reject));
    } else if (roll < 68) {
      auto b = books();
      if (b.empty()) continue;
      s.op = "complete";
      s.caller = w.admin;
      record(s, w.engine.mark_book_complete(w.admin, pick(rng, b)));
    } else {
      auto p = parts(std::nullopt);
      if (p.empty()) continue;
      s.op = "stream";
      const unsigned who = rng() % 10;
      s.caller = who < 7 ? pick(rng, actors.impaired) : who < 9 ? pick(rng, actors.volunteers) : w.admin;
      // sometimes a part code that does not exist
      s.part = rng() % 10 ? pick(rng, p) : PartCode{pick(rng, p).value + 50};
      std::optional<ByteRange> range;
      if (rng() % 2) {
        const std::int64_t a = static_cast<std::int64_t>(rng() % 400);
        range = ByteRange{a, a + 1 + static_cast<std::int64_t>(rng() % 400)};
      }
      auto r = w.delivery.stream_range(s.caller, s.part, range);
      record(s, r);
      if (r.ok()) s.stream = std::move(*r);
    }
    after(s);
  }
}

}  // namespace audiolib::fixtures
