// Copyright 2026 The fairrec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FAIRREC_INTERACTIONS_H_
#define FAIRREC_INTERACTIONS_H_

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairrec/corpus.h"

namespace fairrec {

using UserIndex = std::int32_t;
using ArtistIndex = std::int32_t;

// rating = log2(1 + playcount). Throws std::invalid_argument for playcount < 1.
double LogScale(std::int64_t playcount);

struct RatingEntry {
  ArtistIndex artist = 0;
  double rating = 0.0;
  std::int64_t playcount = 0;

  friend bool operator==(const RatingEntry&, const RatingEntry&) = default;
};

struct ColumnEntry {
  UserIndex user = 0;
  double rating = 0.0;

  friend bool operator==(const ColumnEntry&, const ColumnEntry&) = default;
};

struct Triple {
  UserIndex user = 0;
  ArtistIndex artist = 0;
  std::int64_t playcount = 0;
};

class BinaryView;

// Sparse user x artist matrix of log-scaled playcounts, stored both
// row-major (per user, artists ascending) and column-major (per artist,
// users ascending). User and artist indices follow the lexicographic order of
// their ids, so index order doubles as id order for tie-breaking.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;

  static InteractionMatrix Build(const FilteredCorpus& corpus);
  // `user_ids` and `artist_ids` must be sorted and unique; triples may come
  // in any order but (user, artist) pairs must be unique.
  static InteractionMatrix FromTriples(std::vector<std::string> user_ids,
                                       std::vector<std::string> artist_ids,
                                       std::vector<Triple> triples);

  std::size_t n_users() const { return user_ids_.size(); }
  std::size_t n_artists() const { return artist_ids_.size(); }
  std::size_t nnz() const { return entries_.size(); }

  std::span<const RatingEntry> Row(UserIndex u) const;
  std::span<const ColumnEntry> Column(ArtistIndex a) const;
  std::optional<double> Rating(UserIndex u, ArtistIndex a) const;

  const std::string& user_id(UserIndex u) const { return user_ids_.at(static_cast<std::size_t>(u)); }
  const std::string& artist_id(ArtistIndex a) const {
    return artist_ids_.at(static_cast<std::size_t>(a));
  }
  const std::vector<std::string>& user_ids() const { return user_ids_; }
  const std::vector<std::string>& artist_ids() const { return artist_ids_; }
  std::optional<UserIndex> FindUser(std::string_view id) const;
  std::optional<ArtistIndex> FindArtist(std::string_view id) const;

  // Same index space with the listed (user, artist) entries removed.
  // `removed[u]` lists artists to drop for user u; may be shorter than n_users.
  InteractionMatrix WithoutEntries(const std::vector<std::vector<ArtistIndex>>& removed) const;

  std::vector<Triple> Triples() const;
  BinaryView Binarize() const;

  void CheckUser(UserIndex u) const;
  void CheckArtist(ArtistIndex a) const;

  friend bool operator==(const InteractionMatrix&, const InteractionMatrix&) = default;

 private:
  std::vector<std::string> user_ids_;
  std::vector<std::string> artist_ids_;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<RatingEntry> entries_;
  std::vector<std::size_t> col_offsets_{0};
  std::vector<ColumnEntry> col_entries_;
};

// S(u, i) = 1 for stored entries and 0 elsewhere.
class BinaryView {
 public:
  explicit BinaryView(const InteractionMatrix& matrix) : matrix_(&matrix) {}

  int operator()(UserIndex u, ArtistIndex a) const { return matrix_->Rating(u, a) ? 1 : 0; }
  std::size_t RowSum(UserIndex u) const { return matrix_->Row(u).size(); }
  std::size_t Sum() const { return matrix_->nnz(); }
  std::size_t n_users() const { return matrix_->n_users(); }
  std::size_t n_artists() const { return matrix_->n_artists(); }

 private:
  const InteractionMatrix* matrix_;
};

struct PopularityIndex {
  std::vector<std::int64_t> total_plays;
  std::vector<std::int64_t> listener_count;
  // Top 20% of artists by total plays (ceil), ties broken by artist id.
  std::vector<bool> top_head;
  std::size_t top_head_size = 0;

  bool IsLongTail(ArtistIndex a) const { return !top_head.at(static_cast<std::size_t>(a)); }
};

PopularityIndex BuildPopularity(const InteractionMatrix& matrix, double head_fraction = 0.2);

// Little-endian snapshot:
//   char[4] "FRIM", u32 version (1), u64 n_users, u64 n_artists, u64 nnz,
//   nnz x { u32 user, u32 artist, u64 playcount } in row-major order,
//   n_users + n_artists x { u32 byte_length, bytes } ids.
void WriteSnapshot(std::ostream& out, const InteractionMatrix& matrix);
InteractionMatrix ReadSnapshot(std::istream& in);

}  // namespace fairrec

#endif  // FAIRREC_INTERACTIONS_H_
