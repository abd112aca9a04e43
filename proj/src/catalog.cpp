#include "audiolib/catalog.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "audiolib/text.hpp"
#include "engine_support.hpp"

namespace audiolib {

namespace {

struct PartStats {
  int approved = 0;
  int total = 0;
  double approved_duration = 0;
  bool duration_known = true;
};

std::map<BookCode, PartStats> part_stats(const store::State& s) {
  std::map<BookCode, PartStats> out;
  for (const auto& [key, v] : s.table<Part>()) {
    auto& st = out[v.value.book];
    ++st.total;
    if (v.value.status == PartStatus::Approved) {
      ++st.approved;
      if (v.value.duration_seconds) {
        st.approved_duration += *v.value.duration_seconds;
      } else {
        st.duration_known = false;
      }
    }
  }
  return out;
}

BookSummary make_summary(const Book& book, const PartStats* st) {
  BookSummary out{book, 0, 0, std::nullopt};
  if (st) {
    out.approved_parts = st->approved;
    out.total_parts = st->total;
    if (st->approved > 0 && st->duration_known) out.approved_duration_seconds = st->approved_duration;
  }
  return out;
}

bool older_request(const Book& a, const Book& b) {
  return std::tie(a.requested_at, a.code) < std::tie(b.requested_at, b.code);
}

Result<const UserAccount*> caller_of(const store::State& s, const AccountId& id) {
  return detail::require_active(s, id);
}

}  // namespace

namespace catalog {

std::vector<Book> demanded_books(const store::State& s) {
  std::vector<Book> out;
  for (const auto& [key, v] : s.table<Book>()) {
    if (v.value.status == BookStatus::Requested) out.push_back(v.value);
  }
  std::sort(out.begin(), out.end(), older_request);
  return out;
}

std::vector<Book> requests_of(const store::State& s, const AccountId& impaired) {
  std::vector<Book> out;
  for (const auto& [key, v] : s.table<Book>()) {
    if (v.value.requested_by == impaired) out.push_back(v.value);
  }
  std::sort(out.begin(), out.end(), older_request);
  return out;
}

std::vector<RecentPart> recently_added(const store::State& s, std::size_t limit) {
  std::vector<const Part*> approved;
  for (const auto& [key, v] : s.table<Part>()) {
    if (v.value.status == PartStatus::Approved) approved.push_back(&v.value);
  }
  auto newer = [](const Part* a, const Part* b) { return std::tie(a->added_at, a->code) > std::tie(b->added_at, b->code); };
  const std::size_t n = std::min(limit, approved.size());
  std::partial_sort(approved.begin(), approved.begin() + static_cast<std::ptrdiff_t>(n), approved.end(), newer);
  std::vector<RecentPart> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Book* b = s.book(approved[i]->book);
    out.push_back(RecentPart{*approved[i], b ? b->title : "", b ? b->author : ""});
  }
  return out;
}

std::vector<ReadRanking> mostly_read(const store::State& s, std::size_t limit) {
  std::map<BookCode, ReadRanking> by_book;
  for (const auto& [key, v] : s.table<PlaybackEvent>()) {
    auto& r = by_book[v.value.book];
    r.book = v.value.book;
    ++r.plays;
    r.last_played = std::max(r.last_played, v.value.at);
  }
  std::vector<ReadRanking> out;
  out.reserve(by_book.size());
  for (auto& [code, r] : by_book) {
    if (const Book* b = s.book(code)) {
      r.title = b->title;
      r.author = b->author;
    }
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end(), [](const ReadRanking& a, const ReadRanking& b) {
    if (a.plays != b.plays) return a.plays > b.plays;
    if (a.last_played != b.last_played) return a.last_played > b.last_played;
    return a.book < b.book;
  });
  if (out.size() > limit) out.resize(limit);
  return out;
}

BookSummary summarize(const store::State& s, const Book& book) {
  PartStats st;
  bool any = false;
  for (const auto& [key, v] : s.table<Part>()) {
    if (v.value.book != book.code) continue;
    any = true;
    ++st.total;
    if (v.value.status == PartStatus::Approved) {
      ++st.approved;
      if (v.value.duration_seconds) {
        st.approved_duration += *v.value.duration_seconds;
      } else {
        st.duration_known = false;
      }
    }
  }
  return make_summary(book, any ? &st : nullptr);
}

bool part_visible_to(const UserAccount& caller, const Part& part) {
  switch (caller.role) {
    case Role::Admin: return true;
    case Role::Volunteer: return part.status == PartStatus::Approved || part.submitted_by == caller.id;
    case Role::Impaired: return part.status == PartStatus::Approved;
  }
  return false;
}

}  // namespace catalog

Result<std::vector<Book>> Catalog::list_demanded_books(const AccountId& caller) const {
  auto snap = store_.snapshot();
  auto acc = caller_of(*snap, caller);
  if (!acc) return acc.error();
  if ((*acc)->role == Role::Impaired) return Error{ErrorCode::Forbidden, "requires Volunteer or Admin"};
  return catalog::demanded_books(*snap);
}

Result<std::vector<Book>> Catalog::list_my_requests(const AccountId& caller) const {
  auto snap = store_.snapshot();
  if (auto a = detail::require_role(*snap, caller, Role::Impaired); !a) return a.error();
  return catalog::requests_of(*snap, caller);
}

Result<std::vector<Book>> Catalog::list_assignments(const AccountId& caller) const {
  auto snap = store_.snapshot();
  if (auto a = detail::require_role(*snap, caller, Role::Volunteer); !a) return a.error();
  std::vector<Book> out;
  for (const auto& [key, v] : snap->table<Book>()) {
    if (v.value.assigned_reader == caller) out.push_back(v.value);
  }
  std::sort(out.begin(), out.end(), [](const Book& a, const Book& b) { return a.code < b.code; });
  return out;
}

Result<std::vector<RecentPart>> Catalog::list_recently_added(const AccountId& caller, std::size_t limit) const {
  auto snap = store_.snapshot();
  if (auto a = caller_of(*snap, caller); !a) return a.error();
  return catalog::recently_added(*snap, limit);
}

Result<std::vector<ReadRanking>> Catalog::list_mostly_read(const AccountId& caller, std::size_t limit) const {
  auto snap = store_.snapshot();
  if (auto a = caller_of(*snap, caller); !a) return a.error();
  return catalog::mostly_read(*snap, limit);
}

Result<std::vector<BookSummary>> Catalog::search_books(const AccountId& caller, const std::string& query) const {
  auto snap = store_.snapshot();
  auto acc = caller_of(*snap, caller);
  if (!acc) return acc.error();
  const std::string needle = text::fold_case(text::collapse_whitespace(query));
  if (needle.empty()) return Error{ErrorCode::EmptyQuery, "query is empty"};

  const bool impaired = (*acc)->role == Role::Impaired;
  const auto stats = part_stats(*snap);
  std::vector<BookSummary> out;
  for (const auto& [key, v] : snap->table<Book>()) {
    const Book& b = v.value;
    auto it = stats.find(b.code);
    const PartStats* st = it == stats.end() ? nullptr : &it->second;
    if (impaired && (!st || st->approved == 0)) continue;
    if (text::fold_case(b.title).find(needle) == std::string::npos &&
        text::fold_case(b.author).find(needle) == std::string::npos) {
      continue;
    }
    out.push_back(make_summary(b, st));
    // listeners do not learn about parts still waiting for review
    if (impaired) out.back().total_parts = out.back().approved_parts;
  }
  std::sort(out.begin(), out.end(), [](const BookSummary& a, const BookSummary& b) { return a.book.code < b.book.code; });
  return out;
}

Result<BookSummary> Catalog::book_details(const AccountId& caller, BookCode code) const {
  auto snap = store_.snapshot();
  auto acc = caller_of(*snap, caller);
  if (!acc) return acc.error();
  const Book* b = snap->book(code);
  if (!b) return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
  auto summary = catalog::summarize(*snap, *b);
  if ((*acc)->role == Role::Impaired) {
    if (summary.approved_parts == 0 && b->requested_by != caller) {
      return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
    }
    summary.total_parts = summary.approved_parts;
  }
  return summary;
}

Result<std::vector<Part>> Catalog::list_book_parts(const AccountId& caller, BookCode code) const {
  auto snap = store_.snapshot();
  auto acc = caller_of(*snap, caller);
  if (!acc) return acc.error();
  if (!snap->book(code)) return Error{ErrorCode::NotFound, "book " + store::book_key(code)};
  std::vector<Part> out;
  for (const auto& [key, v] : snap->table<Part>()) {
    if (v.value.book == code && catalog::part_visible_to(**acc, v.value)) out.push_back(v.value);
  }
  std::sort(out.begin(), out.end(), [](const Part& a, const Part& b) { return a.seq < b.seq; });
  return out;
}

}  // namespace audiolib
