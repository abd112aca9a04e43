#pragma once

// Role-aware read views over books and parts. Every call works on one
// snapshot, so a listing never mixes two store revisions.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "audiolib/domain.hpp"
#include "audiolib/result.hpp"
#include "audiolib/store.hpp"

namespace audiolib {

struct BookSummary {
  Book book;
  int approved_parts = 0;
  int total_parts = 0;
  std::optional<double> approved_duration_seconds;
};

struct RecentPart {
  Part part;
  std::string book_title;
  std::string book_author;
};

struct ReadRanking {
  BookCode book;
  std::string title;
  std::string author;
  std::int64_t plays = 0;
  Timestamp last_played = 0;
};

class Catalog {
 public:
  explicit Catalog(const store::Store& store) : store_(store) {}

  /// Requested books, oldest request first. Volunteers and admins only.
  Result<std::vector<Book>> list_demanded_books(const AccountId& caller) const;
  Result<std::vector<Book>> list_my_requests(const AccountId& caller) const;
  /// Books whose assigned reader is the calling volunteer.
  Result<std::vector<Book>> list_assignments(const AccountId& caller) const;

  Result<std::vector<RecentPart>> list_recently_added(const AccountId& caller, std::size_t limit) const;
  Result<std::vector<ReadRanking>> list_mostly_read(const AccountId& caller, std::size_t limit) const;
  Result<std::vector<BookSummary>> search_books(const AccountId& caller, const std::string& query) const;

  Result<BookSummary> book_details(const AccountId& caller, BookCode book) const;
  /// Parts of one book in sequence order, filtered by what the caller may see.
  Result<std::vector<Part>> list_book_parts(const AccountId& caller, BookCode book) const;

 private:
  const store::Store& store_;
};

// Snapshot-level forms of the listings above, with the caller already
// resolved. Exposed for reuse by the service layer.
namespace catalog {

std::vector<Book> demanded_books(const store::State& s);
std::vector<Book> requests_of(const store::State& s, const AccountId& impaired);
std::vector<RecentPart> recently_added(const store::State& s, std::size_t limit);
std::vector<ReadRanking> mostly_read(const store::State& s, std::size_t limit);
BookSummary summarize(const store::State& s, const Book& book);
bool part_visible_to(const UserAccount& caller, const Part& part);

}  // namespace catalog

}  // namespace audiolib
